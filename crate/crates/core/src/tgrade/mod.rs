//! Graded components of T-ideals and T-spaces.
//!
//! Everything here lives in one multidegree at a time: a [`GradedSpan`] is a
//! subspace of the span of the words of a fixed multidegree, kept in
//! canonical reduced row-echelon form. [`TEngine`] builds and caches the
//! components of the commutator T-spaces `V^(n)` and T-ideals `T^(n)`, of
//! T-spaces and T-ideals generated by arbitrary polynomials, of centers of
//! the relatively free algebras, and of the ideals generated by proper
//! polynomials of bounded-below degree.
//!
//! Components are computed with infinite-field semantics: a T-space is
//! closed under taking multihomogeneous components, whatever the
//! characteristic of the coefficients.

mod subst;

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex};

use thiserror::Error;

use crate::freealg::{words_of_multidegree, FreeAlgError, MultiDegree, NcPoly, Word};
use crate::linalg::{kernel_of, EchelonBuilder, Rref, SparseRow};
use crate::pbw::{PbwEngine, PbwError};
use crate::scalars::{FieldSpec, Scalar};

pub use subst::{Part, Pattern};

/// The component of `g` selected by `pattern`, as a polynomial of the given
/// rank.
pub fn substitution_instance(g: &NcPoly, pattern: &Pattern, rank: usize) -> NcPoly {
    NcPoly::from_terms(rank, g.field(), subst::instance(g, pattern)).expect("pattern words fit the rank")
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TgradeError {
    #[error("polynomial is not of multidegree {expected}: found a term of multidegree {found}")]
    MultiDegreeMismatch { expected: MultiDegree, found: MultiDegree },
    #[error("spans live in different components: {0} vs {1}")]
    SpanMismatch(String, String),
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("resource cap exceeded: {what} (limit {limit})")]
    CapExceeded { what: String, limit: u64 },
    #[error("commutator degree must be at least 2, got {0}")]
    DegreeTooSmall(usize),
    #[error(transparent)]
    Pbw(#[from] PbwError),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
}

/// Explicit resource limits. Hitting one is reported as
/// [`TgradeError::CapExceeded`], never as a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    pub max_total_degree: u32,
    pub max_substitutions: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_total_degree: 12, max_substitutions: 20_000_000 }
    }
}

/// The words of one multidegree with their column positions.
#[derive(Debug)]
pub struct Monomials {
    multidegree: MultiDegree,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
}

impl Monomials {
    pub fn new(d: &MultiDegree) -> Self {
        let words = words_of_multidegree(d);
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Monomials { multidegree: d.clone(), words, index }
    }

    pub fn multidegree(&self) -> &MultiDegree {
        &self.multidegree
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn column(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn row_of(&self, f: &NcPoly) -> Result<SparseRow, TgradeError> {
        let mut row = Vec::with_capacity(f.len());
        for (w, c) in f.terms() {
            match self.index.get(w) {
                Some(&j) => row.push((j, c.clone())),
                None => {
                    return Err(TgradeError::MultiDegreeMismatch {
                        expected: self.multidegree.clone(),
                        found: w.multidegree(self.multidegree.rank()),
                    })
                }
            }
        }
        row.sort_by_key(|(j, _)| *j);
        Ok(row)
    }

    fn row_of_map(&self, m: &HashMap<Word, Scalar>) -> SparseRow {
        let mut row: SparseRow = m
            .iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(w, c)| (self.index[w], c.clone()))
            .collect();
        row.sort_by_key(|(j, _)| *j);
        row
    }

    fn poly_of(&self, field: FieldSpec, row: &[Scalar]) -> NcPoly {
        NcPoly::from_terms(
            self.multidegree.rank(),
            field,
            row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (self.words[j].clone(), c.clone())),
        )
        .expect("words of the component fit its rank")
    }
}

/// All words of multidegree `d` in canonical order.
pub fn monomials(d: &MultiDegree) -> Vec<Word> {
    words_of_multidegree(d)
}

/// A subspace of one multidegree component of the free algebra, in
/// canonical form: two spans are equal iff their matrices are identical.
#[derive(Clone)]
pub struct GradedSpan {
    field: FieldSpec,
    monomials: Arc<Monomials>,
    basis: Rref,
}

impl GradedSpan {
    pub fn zero(field: FieldSpec, monomials: Arc<Monomials>) -> Self {
        let n = monomials.len();
        GradedSpan { field, monomials, basis: Rref::zero(field, n) }
    }

    pub fn full(field: FieldSpec, monomials: Arc<Monomials>) -> Self {
        let n = monomials.len();
        GradedSpan { field, monomials, basis: Rref::full(field, n) }
    }

    /// The span of the given polynomials, all of which must be of the
    /// component's multidegree.
    pub fn from_polys<'a>(
        field: FieldSpec,
        monomials: Arc<Monomials>,
        polys: impl IntoIterator<Item = &'a NcPoly>,
    ) -> Result<Self, TgradeError> {
        let mut b = EchelonBuilder::new(field, monomials.len());
        for f in polys {
            b.insert(&monomials.row_of(f)?);
        }
        Ok(GradedSpan { field, monomials, basis: b.finish() })
    }

    pub fn rank(&self) -> usize {
        self.monomials.multidegree.rank()
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn multidegree(&self) -> &MultiDegree {
        &self.monomials.multidegree
    }

    pub fn monomials(&self) -> &Arc<Monomials> {
        &self.monomials
    }

    pub fn basis(&self) -> &Rref {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.rank()
    }

    pub fn ambient_dim(&self) -> usize {
        self.monomials.len()
    }

    pub fn codim(&self) -> usize {
        self.basis.codim()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// The canonical basis rows as polynomials.
    pub fn rows(&self) -> Vec<NcPoly> {
        self.basis.rows().iter().map(|r| self.monomials.poly_of(self.field, r)).collect()
    }

    fn check_key(&self, other: &GradedSpan) -> Result<(), TgradeError> {
        if self.field != other.field || self.multidegree() != other.multidegree() {
            return Err(TgradeError::SpanMismatch(self.describe(), other.describe()));
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!("{} over {}", self.multidegree(), self.field)
    }

    fn row(&self, f: &NcPoly) -> Result<SparseRow, TgradeError> {
        if f.field() != self.field {
            return Err(TgradeError::SpanMismatch(self.describe(), format!("polynomial over {}", f.field())));
        }
        if f.rank() != self.rank() {
            return Err(TgradeError::RankMismatch(self.rank(), f.rank()));
        }
        self.monomials.row_of(f)
    }

    pub fn contains(&self, f: &NcPoly) -> Result<bool, TgradeError> {
        Ok(self.basis.contains(&self.row(f)?))
    }

    /// Coordinates of `f` modulo the span (zero iff `f` is in the span).
    pub fn quotient_coords(&self, f: &NcPoly) -> Result<Vec<Scalar>, TgradeError> {
        Ok(self.basis.quotient_coords(&self.row(f)?))
    }

    pub fn leq(&self, other: &GradedSpan) -> Result<bool, TgradeError> {
        self.check_key(other)?;
        Ok(self.basis.is_subspace_of(&other.basis))
    }

    pub fn equals(&self, other: &GradedSpan) -> Result<bool, TgradeError> {
        self.check_key(other)?;
        Ok(self.basis == other.basis)
    }

    pub fn sum(&self, other: &GradedSpan) -> Result<GradedSpan, TgradeError> {
        self.check_key(other)?;
        Ok(GradedSpan { field: self.field, monomials: self.monomials.clone(), basis: self.basis.sum(&other.basis) })
    }

    /// A basis row of `self` lying outside `other`, if any.
    pub fn witness_outside(&self, other: &GradedSpan) -> Result<Option<NcPoly>, TgradeError> {
        self.check_key(other)?;
        Ok(self.rows().into_iter().find(|f| !other.contains(f).unwrap_or(false)))
    }
}

impl PartialEq for GradedSpan {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.multidegree() == other.multidegree() && self.basis == other.basis
    }
}

impl Eq for GradedSpan {}

impl fmt::Debug for GradedSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedSpan({} over {}, dim {}/{})", self.multidegree(), self.field, self.dim(), self.ambient_dim())
    }
}

pub fn contains(s: &GradedSpan, f: &NcPoly) -> Result<bool, TgradeError> {
    s.contains(f)
}

pub fn span_leq(a: &GradedSpan, b: &GradedSpan) -> Result<bool, TgradeError> {
    a.leq(b)
}

pub fn span_equal(a: &GradedSpan, b: &GradedSpan) -> Result<bool, TgradeError> {
    a.equals(b)
}

/// The span of all products of a basis row of `a` with a basis row of `b`.
pub fn product_span(a: &GradedSpan, b: &GradedSpan) -> Result<GradedSpan, TgradeError> {
    if a.field != b.field {
        return Err(TgradeError::SpanMismatch(a.describe(), b.describe()));
    }
    if a.rank() != b.rank() {
        return Err(TgradeError::RankMismatch(a.rank(), b.rank()));
    }
    let monos = Arc::new(Monomials::new(&a.multidegree().add(b.multidegree())));
    let mut builder = EchelonBuilder::new(a.field, monos.len());
    let (ra, rb) = (a.rows(), b.rows());
    'outer: for f in &ra {
        for g in &rb {
            if builder.is_full() {
                break 'outer;
            }
            builder.insert(&monos.row_of(&f.mul(g))?);
        }
    }
    Ok(GradedSpan { field: a.field, monomials: monos, basis: builder.finish() })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Key {
    CommSpace(usize, MultiDegree),
    CommIdeal(usize, MultiDegree),
    GenSpace(Arc<str>, MultiDegree),
    GenIdeal(Arc<str>, MultiDegree),
    ProperIdeal(usize, MultiDegree),
}

/// Builds and caches graded components for one rank and field.
///
/// Caches are behind a mutex that is never held while computing, so the
/// engine can be shared between threads.
pub struct TEngine {
    rank: usize,
    field: FieldSpec,
    caps: Caps,
    monomials: Mutex<HashMap<MultiDegree, Arc<Monomials>>>,
    spans: Mutex<HashMap<Key, Arc<GradedSpan>>>,
    pbw: Mutex<Option<Arc<PbwEngine>>>,
}

impl TEngine {
    pub fn new(rank: usize, field: FieldSpec) -> Self {
        Self::with_caps(rank, field, Caps::default())
    }

    pub fn with_caps(rank: usize, field: FieldSpec, caps: Caps) -> Self {
        TEngine {
            rank,
            field,
            caps,
            monomials: Mutex::new(HashMap::new()),
            spans: Mutex::new(HashMap::new()),
            pbw: Mutex::new(None),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn caps(&self) -> Caps {
        self.caps
    }

    pub fn monomials(&self, d: &MultiDegree) -> Arc<Monomials> {
        if let Some(m) = self.monomials.lock().unwrap().get(d) {
            return m.clone();
        }
        let m = Arc::new(Monomials::new(d));
        self.monomials.lock().unwrap().entry(d.clone()).or_insert(m).clone()
    }

    pub fn zero_span(&self, d: &MultiDegree) -> GradedSpan {
        GradedSpan::zero(self.field, self.monomials(d))
    }

    pub fn full_span(&self, d: &MultiDegree) -> GradedSpan {
        GradedSpan::full(self.field, self.monomials(d))
    }

    pub fn span_of<'a>(&self, d: &MultiDegree, polys: impl IntoIterator<Item = &'a NcPoly>) -> Result<GradedSpan, TgradeError> {
        GradedSpan::from_polys(self.field, self.monomials(d), polys)
    }

    fn check(&self, d: &MultiDegree) -> Result<(), TgradeError> {
        if d.rank() != self.rank {
            return Err(TgradeError::RankMismatch(self.rank, d.rank()));
        }
        if d.total() > self.caps.max_total_degree {
            return Err(TgradeError::CapExceeded {
                what: format!("total degree of {d}"),
                limit: self.caps.max_total_degree as u64,
            });
        }
        Ok(())
    }

    fn cached(&self, key: &Key) -> Option<Arc<GradedSpan>> {
        self.spans.lock().unwrap().get(key).cloned()
    }

    fn store(&self, key: Key, span: GradedSpan) -> Arc<GradedSpan> {
        self.spans.lock().unwrap().entry(key).or_insert_with(|| Arc::new(span)).clone()
    }

    fn letter(&self, i: usize) -> NcPoly {
        NcPoly::var(self.rank, self.field, i)
    }

    fn word_poly(&self, w: &Word) -> NcPoly {
        NcPoly::monomial(self.rank, self.field, w.clone(), self.field.one())
    }

    /// Pairs `(e, d - e)` with both parts of positive total degree.
    fn splits(d: &MultiDegree) -> Vec<(MultiDegree, MultiDegree)> {
        d.below()
            .into_iter()
            .filter(|e| e.total() > 0 && e.total() < d.total())
            .map(|e| {
                let rest = d.checked_sub(&e).unwrap();
                (e, rest)
            })
            .collect()
    }

    /// Component of `V^(n)`, the T-space generated by `[x_1, …, x_n]`: the
    /// span of `[v, w]` for `v` in `V^(n-1)` and `w` a word.
    pub fn commutator_tspace(&self, n: usize, d: &MultiDegree) -> Result<Arc<GradedSpan>, TgradeError> {
        if n < 2 {
            return Err(TgradeError::DegreeTooSmall(n));
        }
        self.check(d)?;
        let key = Key::CommSpace(n, d.clone());
        if let Some(s) = self.cached(&key) {
            return Ok(s);
        }
        let monos = self.monomials(d);
        let mut b = EchelonBuilder::new(self.field, monos.len());
        if d.total() as usize >= n {
            'outer: for (e, rest) in Self::splits(d) {
                if (e.total() as usize) < n - 1 {
                    continue;
                }
                let lefts: Vec<NcPoly> = if n == 2 {
                    words_of_multidegree(&e).iter().map(|w| self.word_poly(w)).collect()
                } else {
                    self.commutator_tspace(n - 1, &e)?.rows()
                };
                let rights: Vec<NcPoly> = words_of_multidegree(&rest).iter().map(|w| self.word_poly(w)).collect();
                for v in &lefts {
                    for w in &rights {
                        if b.is_full() {
                            break 'outer;
                        }
                        b.insert(&monos.row_of(&v.commutator(w))?);
                    }
                }
            }
        }
        Ok(self.store(key, GradedSpan { field: self.field, monomials: monos, basis: b.finish() }))
    }

    /// Component of `T^(n)`, the T-ideal generated by `[x_1, …, x_n]`.
    pub fn commutator_tideal(&self, n: usize, d: &MultiDegree) -> Result<Arc<GradedSpan>, TgradeError> {
        if n < 2 {
            return Err(TgradeError::DegreeTooSmall(n));
        }
        self.check(d)?;
        let key = Key::CommIdeal(n, d.clone());
        if let Some(s) = self.cached(&key) {
            return Ok(s);
        }
        let space = if (d.total() as usize) < n { None } else { Some(self.commutator_tspace(n, d)?) };
        let span = self.close_ideal(d, space.as_deref(), &|e| self.commutator_tideal(n, e))?;
        Ok(self.store(key, span))
    }

    /// `S_d + Σ_i (x_i I_{d-e_i} + I_{d-e_i} x_i)`: the degree-`d` part of
    /// the ideal generated by a graded subspace `S`, given the lower parts.
    fn close_ideal(
        &self,
        d: &MultiDegree,
        space: Option<&GradedSpan>,
        lower: &dyn Fn(&MultiDegree) -> Result<Arc<GradedSpan>, TgradeError>,
    ) -> Result<GradedSpan, TgradeError> {
        let monos = self.monomials(d);
        let mut b = EchelonBuilder::new(self.field, monos.len());
        'outer: for i in 0..self.rank {
            let Some(e) = d.checked_sub(&MultiDegree::unit(self.rank, i)) else { continue };
            let below = lower(&e)?;
            if below.is_zero() {
                continue;
            }
            let x = self.letter(i);
            for f in below.rows() {
                for g in [x.mul(&f), f.mul(&x)] {
                    if b.is_full() {
                        break 'outer;
                    }
                    b.insert(&monos.row_of(&g)?);
                }
            }
        }
        if let Some(s) = space {
            for r in s.basis.sparse_rows() {
                if b.is_full() {
                    break;
                }
                b.insert(&r);
            }
        }
        Ok(GradedSpan { field: self.field, monomials: monos, basis: b.finish() })
    }

    fn generator_key(gens: &[NcPoly]) -> Arc<str> {
        let mut texts: Vec<String> = gens.iter().map(|g| format!("{}|{}", g.rank(), g.to_text())).collect();
        texts.sort();
        texts.dedup();
        Arc::from(texts.join(";"))
    }

    /// Component of the T-space generated by `gens` (full linearization
    /// and substitution of words, the unit included).
    pub fn tspace_component(&self, gens: &[NcPoly], d: &MultiDegree) -> Result<Arc<GradedSpan>, TgradeError> {
        self.check(d)?;
        let key = Key::GenSpace(Self::generator_key(gens), d.clone());
        if let Some(s) = self.cached(&key) {
            return Ok(s);
        }
        let monos = self.monomials(d);
        let mut b = EchelonBuilder::new(self.field, monos.len());
        let full = monos.len();
        self.fill_tspace(gens, d, &monos, &mut b, full)?;
        Ok(self.store(key, GradedSpan { field: self.field, monomials: monos, basis: b.finish() }))
    }

    /// `base` plus the component of the T-space generated by `gens`,
    /// stopping as soon as the span reaches the dimension of `goal` (when
    /// given). Useful for showing that a single element regenerates a
    /// known space: the early exit skips most substitution instances.
    pub fn tspace_over(
        &self,
        gens: &[NcPoly],
        d: &MultiDegree,
        base: &GradedSpan,
        goal: Option<&GradedSpan>,
    ) -> Result<GradedSpan, TgradeError> {
        self.check(d)?;
        let monos = self.monomials(d);
        if base.multidegree() != d {
            return Err(TgradeError::SpanMismatch(base.describe(), format!("component {d}")));
        }
        let mut b = EchelonBuilder::new(self.field, monos.len());
        for r in base.basis.sparse_rows() {
            b.insert(&r);
        }
        let stop = goal.map_or(monos.len(), |g| g.dim());
        if b.rank() < stop {
            self.fill_tspace(gens, d, &monos, &mut b, stop)?;
        }
        Ok(GradedSpan { field: self.field, monomials: monos, basis: b.finish() })
    }

    fn fill_tspace(
        &self,
        gens: &[NcPoly],
        d: &MultiDegree,
        monos: &Monomials,
        b: &mut EchelonBuilder,
        stop: usize,
    ) -> Result<(), TgradeError> {
        let mut budget = self.caps.max_substitutions;
        let mut failure: Option<TgradeError> = None;
        for g in gens {
            if g.field() != self.field {
                return Err(TgradeError::SpanMismatch(format!("engine over {}", self.field), format!("generator over {}", g.field())));
            }
            for (gd, part) in g.multihomo_split() {
                let flow = subst::for_each_pattern(&gd.0, d, &mut |pattern| {
                    if b.rank() >= stop {
                        return ControlFlow::Break(());
                    }
                    if budget == 0 {
                        failure = Some(TgradeError::CapExceeded {
                            what: format!("substitution instances at {d}"),
                            limit: self.caps.max_substitutions,
                        });
                        return ControlFlow::Break(());
                    }
                    budget -= 1;
                    let inst = subst::instance(&part, pattern);
                    if !inst.is_empty() {
                        b.insert(&monos.row_of_map(&inst));
                    }
                    ControlFlow::Continue(())
                });
                if let Some(e) = failure.take() {
                    return Err(e);
                }
                if flow.is_break() {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    /// Component of the T-ideal generated by `gens`.
    pub fn tideal_component(&self, gens: &[NcPoly], d: &MultiDegree) -> Result<Arc<GradedSpan>, TgradeError> {
        self.check(d)?;
        let key = Key::GenIdeal(Self::generator_key(gens), d.clone());
        if let Some(s) = self.cached(&key) {
            return Ok(s);
        }
        let space = self.tspace_component(gens, d)?;
        let span = self.close_ideal(d, Some(&space), &|e| self.tideal_component(gens, e))?;
        Ok(self.store(key, span))
    }

    /// Component of `Z_q`, the T-space generated by `x^q`.
    pub fn power_tspace(&self, q: u32, d: &MultiDegree) -> Result<Arc<GradedSpan>, TgradeError> {
        let g = NcPoly::var(1, self.field, 0).pow(q);
        self.tspace_component(&[g], d)
    }

    /// The preimage in the free algebra of the degree-`d` part of the center
    /// of `F/T^(n)`: all `f` with `[f, x_j] ∈ T^(n)` for every generator.
    pub fn center_component(&self, n: usize, d: &MultiDegree) -> Result<GradedSpan, TgradeError> {
        self.check(d)?;
        let monos = self.monomials(d);
        let targets: Vec<Arc<GradedSpan>> = (0..self.rank)
            .map(|j| self.commutator_tideal(n, &d.add(&MultiDegree::unit(self.rank, j))))
            .collect::<Result<_, _>>()?;
        // one column per word, one row per quotient coordinate
        let mut rows: Vec<SparseRow> = Vec::new();
        let images: Vec<Vec<Scalar>> = monos
            .words()
            .iter()
            .map(|w| {
                let f = self.word_poly(w);
                let mut v = Vec::new();
                for (j, t) in targets.iter().enumerate() {
                    v.extend(t.quotient_coords(&f.commutator(&self.letter(j)))?);
                }
                Ok(v)
            })
            .collect::<Result<_, TgradeError>>()?;
        let height = images.first().map_or(0, Vec::len);
        for r in 0..height {
            let row: SparseRow = images
                .iter()
                .enumerate()
                .filter(|(_, v)| !v[r].is_zero())
                .map(|(c, v)| (c, v[r].clone()))
                .collect();
            if !row.is_empty() {
                rows.push(row);
            }
        }
        let kernel = kernel_of(self.field, monos.len(), &rows);
        let basis = Rref::from_rows(self.field, monos.len(), kernel.iter());
        Ok(GradedSpan { field: self.field, monomials: monos, basis })
    }

    fn pbw_engine(&self, degree: usize) -> Result<Arc<PbwEngine>, TgradeError> {
        let mut slot = self.pbw.lock().unwrap();
        if let Some(e) = slot.as_ref() {
            if e.basis().max_degree() >= degree {
                return Ok(e.clone());
            }
        }
        let e = Arc::new(PbwEngine::new(self.rank, degree.max(8), self.field)?);
        *slot = Some(e.clone());
        Ok(e)
    }

    /// Component of `I_m`, the ideal generated by the proper polynomials of
    /// degree at least `m`. Proper polynomials of degree `k` are spanned by
    /// products of Lie basis elements of degree at least 2.
    pub fn proper_ideal_component(&self, m: usize, d: &MultiDegree) -> Result<Arc<GradedSpan>, TgradeError> {
        self.check(d)?;
        let key = Key::ProperIdeal(m, d.clone());
        if let Some(s) = self.cached(&key) {
            return Ok(s);
        }
        let space = if (d.total() as usize) >= m.max(2) {
            let pbw = self.pbw_engine(d.total() as usize)?;
            let basis = pbw.basis();
            let proper: Vec<NcPoly> = pbw
                .correct_words(d)
                .into_iter()
                .filter(|cw| cw.factors.iter().all(|&i| basis.elements()[i].degree >= 2))
                .map(|cw| cw.expand(basis))
                .collect();
            Some(self.span_of(d, proper.iter())?)
        } else {
            None
        };
        let span = self.close_ideal(d, space.as_ref(), &|e| self.proper_ideal_component(m, e))?;
        Ok(self.store(key, span))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pbw::Weight;

    fn md(v: &[u32]) -> MultiDegree {
        MultiDegree(v.to_vec())
    }

    fn p(text: &str, rank: usize, field: FieldSpec) -> NcPoly {
        NcPoly::parse(text, rank, field).unwrap()
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials(&md(&[1, 1])), vec![Word::from_letters(&[0, 1]), Word::from_letters(&[1, 0])]);
        assert_eq!(monomials(&md(&[2, 1])).len(), 3);
        assert_eq!(monomials(&md(&[1, 1, 1])).len(), 6);
    }

    #[test]
    fn low_degree_commutator_ideal_is_zero() {
        let e = TEngine::new(2, FieldSpec::Q);
        assert!(e.commutator_tideal(3, &md(&[1, 1])).unwrap().is_zero());
    }

    #[test]
    fn commutator_square_in_t3_but_not_t4() {
        let e = TEngine::new(2, FieldSpec::Q);
        let sq = p("[x,y]^2", 2, FieldSpec::Q);
        assert!(e.commutator_tideal(3, &md(&[2, 2])).unwrap().contains(&sq).unwrap());
        assert!(!e.commutator_tideal(4, &md(&[2, 2])).unwrap().contains(&sq).unwrap());
    }

    #[test]
    fn rank_four_product_outside_t3() {
        let e = TEngine::new(4, FieldSpec::Q);
        let f = p("[x,y]*[z,t]", 4, FieldSpec::Q);
        assert!(!e.commutator_tideal(3, &md(&[1, 1, 1, 1])).unwrap().contains(&f).unwrap());
        let a = e.commutator_tideal(2, &md(&[1, 1, 0, 0])).unwrap();
        let b = e.commutator_tideal(2, &md(&[0, 0, 1, 1])).unwrap();
        let prod = product_span(&a, &b).unwrap();
        assert!(!prod.leq(&e.commutator_tideal(3, &md(&[1, 1, 1, 1])).unwrap()).unwrap());
    }

    #[test]
    fn substitution_instance_in_v2() {
        let e = TEngine::new(2, FieldSpec::Q);
        let f = p("[x^2, y]", 2, FieldSpec::Q);
        assert!(e.commutator_tspace(2, &md(&[2, 1])).unwrap().contains(&f).unwrap());
    }

    #[test]
    fn mismatched_multidegree_is_an_error() {
        let e = TEngine::new(2, FieldSpec::Q);
        let s = e.commutator_tideal(3, &md(&[2, 2])).unwrap();
        assert!(matches!(s.contains(&p("x*y", 2, FieldSpec::Q)), Err(TgradeError::MultiDegreeMismatch { .. })));
        let other = e.commutator_tideal(3, &md(&[2, 1])).unwrap();
        assert!(s.leq(&other).is_err());
        assert!(s.equals(&s).unwrap());
    }

    #[test]
    fn product_of_t2_components_lands_in_t3() {
        let e = TEngine::new(3, FieldSpec::Q);
        let a = e.commutator_tideal(2, &md(&[1, 1, 0])).unwrap();
        let b = e.commutator_tideal(2, &md(&[0, 1, 1])).unwrap();
        let prod = product_span(&a, &b).unwrap();
        assert!(prod.leq(&e.commutator_tideal(3, &md(&[1, 2, 1])).unwrap()).unwrap());
        let z = e.zero_span(&md(&[1, 0, 0]));
        assert!(product_span(&z, &a).unwrap().is_zero());
    }

    #[test]
    fn generic_path_matches_commutator_recursion() {
        for field in [FieldSpec::Q, FieldSpec::new(5).unwrap()] {
            let e = TEngine::new(2, field);
            for n in 2..=4usize {
                let g = NcPoly::right_normed_vars(n, field, &(0..n).collect::<Vec<_>>());
                for total in 0..=5u32 {
                    for d in MultiDegree::with_total(2, total) {
                        let fast = e.commutator_tspace(n, &d).unwrap();
                        let slow = e.tspace_component(std::slice::from_ref(&g), &d).unwrap();
                        assert_eq!(*fast, *slow, "V^({n}) at {d} over {field}");
                        let fast = e.commutator_tideal(n, &d).unwrap();
                        let slow = e.tideal_component(std::slice::from_ref(&g), &d).unwrap();
                        assert_eq!(*fast, *slow, "T^({n}) at {d} over {field}");
                    }
                }
            }
        }
    }

    #[test]
    fn generator_order_does_not_matter() {
        let f = FieldSpec::Q;
        let g1 = p("[x,y]^2", 2, f);
        let g2 = p("[x,y,x,y]", 2, f);
        let a = TEngine::new(2, f);
        let b = TEngine::new(2, f);
        for d in MultiDegree::with_total(2, 5) {
            let s = a.tideal_component(&[g1.clone(), g2.clone()], &d).unwrap();
            let t = b.tideal_component(&[g2.clone(), g1.clone()], &d).unwrap();
            assert_eq!(s.basis(), t.basis());
        }
    }

    #[test]
    fn power_tspace_modulo_p() {
        let f5 = FieldSpec::new(5).unwrap();
        let e = TEngine::new(2, f5);
        // the unit lies in Z_5 (substitute x -> 1)
        assert!(!e.power_tspace(5, &md(&[0, 0])).unwrap().is_zero());
        // (xy)^5 is the instance x -> xy
        let z = e.power_tspace(5, &md(&[5, 5])).unwrap();
        assert!(z.contains(&p("(x*y)^5", 2, f5)).unwrap());
        let z1 = e.power_tspace(5, &md(&[1, 0])).unwrap();
        assert!(z1.is_zero());
        // over Q the same T-space contains x·(anything of degree 4 in x)
        let q = TEngine::new(2, FieldSpec::Q);
        assert!(q.power_tspace(5, &md(&[1, 0])).unwrap().contains(&p("x", 2, FieldSpec::Q)).unwrap());
    }

    #[test]
    fn centers_small_cases() {
        let e = TEngine::new(2, FieldSpec::Q);
        let c = e.center_component(3, &md(&[1, 1])).unwrap();
        assert_eq!(c.dim(), 1);
        assert!(c.contains(&p("[x,y]", 2, FieldSpec::Q)).unwrap());
        let c4 = e.center_component(4, &md(&[1, 1])).unwrap();
        assert_eq!(c4, *e.commutator_tideal(3, &md(&[1, 1])).unwrap());
        let f5 = FieldSpec::new(5).unwrap();
        let e5 = TEngine::new(2, f5);
        assert!(e5.center_component(4, &md(&[0, 5])).unwrap().contains(&p("y^5", 2, f5)).unwrap());
    }

    #[test]
    fn proper_ideal_small_cases() {
        let e = TEngine::new(2, FieldSpec::Q);
        assert!(e.proper_ideal_component(3, &md(&[1, 1])).unwrap().is_zero());
        let i2 = e.proper_ideal_component(2, &md(&[1, 1])).unwrap();
        assert_eq!(i2.dim(), 1);
        assert!(i2.contains(&p("[x,y]", 2, FieldSpec::Q)).unwrap());
        assert!(e.proper_ideal_component(4, &md(&[2, 2])).unwrap().contains(&p("[x,y]^2", 2, FieldSpec::Q)).unwrap());
    }

    #[test]
    fn monotone_tower_and_v_in_t() {
        let e = TEngine::new(3, FieldSpec::Q);
        for total in 0..=6u32 {
            for d in MultiDegree::with_total(3, total) {
                for n in 2..=4usize {
                    let t = e.commutator_tideal(n, &d).unwrap();
                    let t1 = e.commutator_tideal(n + 1, &d).unwrap();
                    assert!(t1.leq(&t).unwrap(), "T^({}) <= T^({n}) at {d}", n + 1);
                    assert!(e.commutator_tspace(n, &d).unwrap().leq(&t).unwrap());
                }
            }
        }
    }

    #[test]
    fn members_of_t_n_have_weight_at_least_n() {
        let e = TEngine::new(3, FieldSpec::Q);
        let pbw = PbwEngine::new(3, 6, FieldSpec::Q).unwrap();
        for d in MultiDegree::with_total(3, 5) {
            for n in 2..=4usize {
                for f in e.commutator_tideal(n, &d).unwrap().rows() {
                    assert!(pbw.weight(&f).unwrap() >= Weight::Finite(n));
                }
            }
        }
    }
}
