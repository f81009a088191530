use std::collections::BTreeMap;
use std::fmt;

use super::{letter_name, FreeAlgError, MultiDegree, Word};
use crate::scalars::{FieldSpec, Scalar};

/// A noncommutative polynomial: a finitely supported map from words to
/// nonzero scalars.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NcPoly {
    rank: usize,
    field: FieldSpec,
    terms: BTreeMap<Word, Scalar>,
}

/// Right multiplication, inner derivation or left multiplication by an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    R,
    D,
    L,
}

#[derive(Debug, Clone)]
pub struct Operator {
    pub kind: OpKind,
    pub arg: NcPoly,
}

impl NcPoly {
    pub fn zero(rank: usize, field: FieldSpec) -> Self {
        NcPoly { rank, field, terms: BTreeMap::new() }
    }

    pub fn one(rank: usize, field: FieldSpec) -> Self {
        Self::monomial(rank, field, Word::unit(), field.one())
    }

    pub fn constant(rank: usize, field: FieldSpec, c: Scalar) -> Self {
        Self::monomial(rank, field, Word::unit(), c)
    }

    /// Generator `i`; panics if `i >= rank`.
    pub fn var(rank: usize, field: FieldSpec, i: usize) -> Self {
        assert!(i < rank, "generator {i} outside rank {rank}");
        Self::monomial(rank, field, Word::letter(i), field.one())
    }

    pub fn monomial(rank: usize, field: FieldSpec, w: Word, c: Scalar) -> Self {
        let mut p = Self::zero(rank, field);
        p.add_term(w, c);
        p
    }

    pub fn word(rank: usize, field: FieldSpec, letters: &[usize]) -> Self {
        Self::monomial(rank, field, Word::from_letters(letters), field.one())
    }

    pub fn from_terms(
        rank: usize,
        field: FieldSpec,
        terms: impl IntoIterator<Item = (Word, Scalar)>,
    ) -> Result<Self, FreeAlgError> {
        let mut p = Self::zero(rank, field);
        for (w, c) in terms {
            if let Some(l) = w.max_letter() {
                if l >= rank {
                    return Err(FreeAlgError::LetterOutOfRank { letter: l, rank });
                }
            }
            if !field.contains(&c) {
                return Err(crate::scalars::ScalarError::FieldMismatch(field.characteristic(), c.characteristic()).into());
            }
            p.add_term(w, c);
        }
        Ok(p)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn terms(&self) -> &BTreeMap<Word, Scalar> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Word, Scalar> {
        self.terms
    }

    pub fn coeff(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, w: Word, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    fn compatible(&self, other: &NcPoly) -> Result<(), FreeAlgError> {
        if self.rank != other.rank {
            return Err(FreeAlgError::RankMismatch(self.rank, other.rank));
        }
        if self.field != other.field {
            return Err(crate::scalars::ScalarError::FieldMismatch(
                self.field.characteristic(),
                other.field.characteristic(),
            )
            .into());
        }
        Ok(())
    }

    pub fn try_add(&self, other: &NcPoly) -> Result<NcPoly, FreeAlgError> {
        self.compatible(other)?;
        Ok(self.add(other))
    }

    pub fn try_mul(&self, other: &NcPoly) -> Result<NcPoly, FreeAlgError> {
        self.compatible(other)?;
        Ok(self.mul(other))
    }

    pub fn try_commutator(&self, other: &NcPoly) -> Result<NcPoly, FreeAlgError> {
        self.compatible(other)?;
        Ok(self.commutator(other))
    }

    /// Panicking variants below assume matching rank and field.
    pub fn add(&self, other: &NcPoly) -> NcPoly {
        debug_assert_eq!(self.rank, other.rank);
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NcPoly) -> NcPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> NcPoly {
        self.scale(&self.field.from_i64(-1))
    }

    pub fn scale(&self, c: &Scalar) -> NcPoly {
        if c.is_zero() {
            return Self::zero(self.rank, self.field);
        }
        NcPoly {
            rank: self.rank,
            field: self.field,
            terms: self.terms.iter().map(|(w, a)| (w.clone(), a.mul(c))).collect(),
        }
    }

    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        debug_assert_eq!(self.rank, other.rank);
        let mut out = Self::zero(self.rank, self.field);
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a.mul(b));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> NcPoly {
        let mut acc = Self::one(self.rank, self.field);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `ab - ba`.
    pub fn commutator(&self, other: &NcPoly) -> NcPoly {
        self.mul(other).sub(&other.mul(self))
    }

    /// `[[...[a1, a2], ...], an]`.
    pub fn right_normed(args: &[NcPoly]) -> Result<NcPoly, FreeAlgError> {
        if args.len() < 2 {
            return Err(FreeAlgError::TooFewArguments(args.len()));
        }
        let mut acc = args[0].clone();
        for a in &args[1..] {
            acc = acc.try_commutator(a)?;
        }
        Ok(acc)
    }

    /// `[x_{i1}, ..., x_{in}]` on generators.
    pub fn right_normed_vars(rank: usize, field: FieldSpec, vars: &[usize]) -> NcPoly {
        let args: Vec<_> = vars.iter().map(|&i| Self::var(rank, field, i)).collect();
        Self::right_normed(&args).expect("at least two generators")
    }

    /// Same polynomial viewed in a larger free algebra.
    pub fn widen(&self, rank: usize) -> NcPoly {
        assert!(rank >= self.rank);
        NcPoly { rank, field: self.field, terms: self.terms.clone() }
    }

    /// Applies the unital endomorphism sending generator `i` to `images[i]`.
    pub fn substitute(&self, images: &[NcPoly]) -> Result<NcPoly, FreeAlgError> {
        if images.len() != self.rank {
            return Err(FreeAlgError::ImageCount { expected: self.rank, got: images.len() });
        }
        let target_rank = images.first().map(|p| p.rank).unwrap_or(self.rank);
        for im in images {
            if im.rank != target_rank {
                return Err(FreeAlgError::RankMismatch(target_rank, im.rank));
            }
            if im.field != self.field {
                return Err(crate::scalars::ScalarError::FieldMismatch(
                    self.field.characteristic(),
                    im.field.characteristic(),
                )
                .into());
            }
        }
        let mut out = Self::zero(target_rank, self.field);
        for (w, c) in &self.terms {
            let mut acc = Self::constant(target_rank, self.field, c.clone());
            for l in w.letters() {
                acc = acc.mul(&images[l]);
                if acc.is_zero() {
                    break;
                }
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Substitution with the identity on every generator not in `images`.
    pub fn substitute_some(&self, images: &BTreeMap<usize, NcPoly>) -> Result<NcPoly, FreeAlgError> {
        let full: Vec<NcPoly> = (0..self.rank)
            .map(|i| images.get(&i).cloned().unwrap_or_else(|| Self::var(self.rank, self.field, i)))
            .collect();
        for &i in images.keys() {
            if i >= self.rank {
                return Err(FreeAlgError::LetterOutOfRank { letter: i, rank: self.rank });
            }
        }
        self.substitute(&full)
    }

    pub fn degree_in(&self, var: usize) -> usize {
        self.terms.keys().map(|w| w.count(var)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// The multidegree if `self` is nonzero and multihomogeneous.
    pub fn multidegree(&self) -> Option<MultiDegree> {
        let mut it = self.terms.keys().map(|w| w.multidegree(self.rank));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn multihomo_component(&self, d: &MultiDegree) -> NcPoly {
        NcPoly {
            rank: self.rank,
            field: self.field,
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| &w.multidegree(self.rank) == d)
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn multihomo_split(&self) -> BTreeMap<MultiDegree, NcPoly> {
        let mut out: BTreeMap<MultiDegree, NcPoly> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.multidegree(self.rank))
                .or_insert_with(|| Self::zero(self.rank, self.field))
                .terms
                .insert(w.clone(), c.clone());
        }
        out
    }

    /// Substitutes `var -> x_r + ... + x_{r+k-1}` (fresh generators appended
    /// after the current rank) and splits by the exponents of the fresh
    /// generators.
    pub fn linearize(&self, var: usize, k: usize) -> Result<BTreeMap<MultiDegree, NcPoly>, FreeAlgError> {
        if var >= self.rank {
            return Err(FreeAlgError::LetterOutOfRank { letter: var, rank: self.rank });
        }
        assert!(k >= 1);
        let r = self.rank;
        let wide = r + k;
        let mut images: Vec<NcPoly> = (0..r).map(|i| Self::var(wide, self.field, i)).collect();
        images[var] = (r..wide).fold(Self::zero(wide, self.field), |acc, i| acc.add(&Self::var(wide, self.field, i)));
        let full = self.substitute(&images)?;
        let mut out: BTreeMap<MultiDegree, NcPoly> = BTreeMap::new();
        for (w, c) in full.terms {
            let fresh = MultiDegree(w.multidegree(wide).0[r..].to_vec());
            out.entry(fresh).or_insert_with(|| Self::zero(wide, self.field)).add_term(w, c);
        }
        Ok(out)
    }

    /// Sum over occurrences of `var` of the word with that occurrence removed.
    pub fn delete_derivative(&self, var: usize) -> NcPoly {
        let mut out = Self::zero(self.rank, self.field);
        for (w, c) in &self.terms {
            for (pos, l) in w.letters().enumerate() {
                if l == var {
                    let mut v = w.0.clone();
                    v.remove(pos);
                    out.add_term(Word(v), c.clone());
                }
            }
        }
        out
    }

    /// Proper polynomials are exactly those fixed by every shift `x_i -> x_i + 1`.
    pub fn is_proper(&self) -> bool {
        (0..self.rank).all(|i| {
            let mut images = BTreeMap::new();
            images.insert(i, Self::var(self.rank, self.field, i).add(&Self::one(self.rank, self.field)));
            self.substitute_some(&images).map(|s| &s == self).unwrap_or(false)
        })
    }

    /// Applies operators left to right: `R_y: a -> ay`, `D_y: a -> [a, y]`, `L_y: a -> ya`.
    pub fn apply_operators(&self, ops: &[Operator]) -> Result<NcPoly, FreeAlgError> {
        let mut acc = self.clone();
        for op in ops {
            acc.compatible(&op.arg)?;
            acc = match op.kind {
                OpKind::R => acc.mul(&op.arg),
                OpKind::D => acc.commutator(&op.arg),
                OpKind::L => op.arg.mul(&acc),
            };
        }
        Ok(acc)
    }

    /// Maps every coefficient through `f` into another field.
    pub fn map_field(&self, field: FieldSpec, f: impl Fn(&Scalar) -> Scalar) -> NcPoly {
        let mut out = Self::zero(self.rank, field);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// Text form in the polynomial grammar accepted by [`NcPoly::parse`].
    pub fn to_text(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, (w, c)) in self.terms.iter().enumerate() {
            let mut coeff = c.to_signed_string();
            let negative = coeff.starts_with('-');
            if negative {
                coeff.remove(0);
            }
            if i == 0 {
                if negative {
                    s.push('-');
                }
            } else {
                s.push_str(if negative { " - " } else { " + " });
            }
            let word = word_text(w, self.rank);
            let coeff = if coeff.contains('/') { format!("({coeff})") } else { coeff };
            match (coeff.as_str(), word.is_empty()) {
                (_, true) => s.push_str(&coeff),
                ("1", false) => s.push_str(&word),
                (_, false) => {
                    s.push_str(&coeff);
                    s.push('*');
                    s.push_str(&word);
                }
            }
        }
        s
    }
}

fn word_text(w: &Word, rank: usize) -> String {
    let mut parts: Vec<String> = Vec::new();
    let letters: Vec<usize> = w.letters().collect();
    let mut i = 0;
    while i < letters.len() {
        let mut j = i;
        while j < letters.len() && letters[j] == letters[i] {
            j += 1;
        }
        let name = letter_name(letters[i], rank);
        parts.push(if j - i > 1 { format!("{name}^{}", j - i) } else { name });
        i = j;
    }
    parts.join("*")
}

impl fmt::Debug for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for NcPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}
