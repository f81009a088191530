//! Lyndon basis of the free Lie algebra, correct words (the PBW basis of the
//! free associative algebra) and the weight function.
//!
//! Basis elements are ordered with higher degree first; within a degree the
//! Lyndon words are compared lexicographically (or reverse-lexicographically,
//! see [`TieBreak`]). A correct word is a product `e_{i1} ... e_{it}` with
//! `e_{i1} <= ... <= e_{it}` and weight `sum deg(e_ij) - t + 1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use thiserror::Error;

use crate::freealg::{words_of_multidegree, MultiDegree, NcPoly, Word};
use crate::linalg::{Rref, SparseRow};
use crate::scalars::{FieldSpec, Scalar};

/// Weight theory is a statement about at most three generators.
pub const MAX_RANK: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbwError {
    #[error("rank {0} is not supported (at most {MAX_RANK})")]
    RankTooLarge(usize),
    #[error("multidegree must be nonzero")]
    ZeroMultiDegree,
    #[error("max degree must be at least 1")]
    ZeroDegree,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum TieBreak {
    #[default]
    Lex,
    ReverseLex,
}

/// Binary bracketing of a Lyndon word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Bracket {
    Letter(usize),
    Pair(Box<Bracket>, Box<Bracket>),
}

impl Bracket {
    fn expand(&self, rank: usize, field: FieldSpec) -> NcPoly {
        match self {
            Bracket::Letter(i) => NcPoly::var(rank, field, *i),
            Bracket::Pair(a, b) => a.expand(rank, field).commutator(&b.expand(rank, field)),
        }
    }
}

impl fmt::Debug for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracket::Letter(i) => write!(f, "{}", ["x", "y", "z"][*i]),
            Bracket::Pair(a, b) => write!(f, "[{a:?},{b:?}]"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LieBasisElement {
    pub lyndon: Word,
    pub bracketing: Bracket,
    pub expansion: NcPoly,
    pub degree: usize,
    pub multidegree: MultiDegree,
    /// Position in the global order.
    pub index: usize,
}

/// All Lyndon words over `rank` letters of length `<= max_len`, in lexicographic order.
pub fn lyndon_words(rank: usize, max_len: usize) -> Vec<Word> {
    // Duval's generation algorithm
    let mut out = Vec::new();
    if rank == 0 || max_len == 0 {
        return out;
    }
    let mut w: Vec<usize> = vec![0];
    loop {
        out.push(Word::from_letters(&w));
        let m = w.len();
        while w.len() < max_len {
            let c = w[w.len() - m];
            w.push(c);
        }
        while let Some(&last) = w.last() {
            if last == rank - 1 {
                w.pop();
            } else {
                break;
            }
        }
        match w.last_mut() {
            None => break,
            Some(l) => *l += 1,
        }
    }
    out
}

fn is_lyndon(w: &[u8]) -> bool {
    (1..w.len()).all(|i| w[i..] > *w)
}

/// Standard bracketing: `w = uv` with `v` the longest proper Lyndon suffix.
pub fn standard_bracketing(w: &Word) -> Bracket {
    let letters = &w.0;
    if letters.len() == 1 {
        return Bracket::Letter(letters[0] as usize);
    }
    let split = (1..letters.len()).find(|&i| is_lyndon(&letters[i..])).expect("suffix of length 1 is Lyndon");
    Bracket::Pair(
        Box::new(standard_bracketing(&Word(letters[..split].to_vec()))),
        Box::new(standard_bracketing(&Word(letters[split..].to_vec()))),
    )
}

/// Witt's necklace count of Lyndon words of length `n` over `r` letters.
pub fn witt_dimension(r: u64, n: u64) -> u64 {
    fn mobius(mut n: u64) -> i64 {
        let mut result = 1;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                result = -result;
            }
            p += 1;
        }
        if n > 1 {
            result = -result;
        }
        result
    }
    let mut sum: i64 = 0;
    for d in 1..=n {
        if n.is_multiple_of(d) {
            sum += mobius(d) * (r as i64).pow((n / d) as u32);
        }
    }
    (sum / n as i64) as u64
}

/// The ordered Lie basis up to a degree bound.
#[derive(Clone, Debug)]
pub struct LieBasis {
    rank: usize,
    field: FieldSpec,
    tie_break: TieBreak,
    elements: Vec<LieBasisElement>,
}

impl LieBasis {
    pub fn new(rank: usize, max_degree: usize, field: FieldSpec) -> Result<Self, PbwError> {
        Self::with_tie_break(rank, max_degree, field, TieBreak::Lex)
    }

    pub fn with_tie_break(rank: usize, max_degree: usize, field: FieldSpec, tie_break: TieBreak) -> Result<Self, PbwError> {
        if rank > MAX_RANK {
            return Err(PbwError::RankTooLarge(rank));
        }
        if max_degree == 0 {
            return Err(PbwError::ZeroDegree);
        }
        let mut words = lyndon_words(rank, max_degree);
        words.sort_by(|a, b| {
            b.len().cmp(&a.len()).then_with(|| match tie_break {
                TieBreak::Lex => a.0.cmp(&b.0),
                TieBreak::ReverseLex => b.0.cmp(&a.0),
            })
        });
        let elements = words
            .into_iter()
            .enumerate()
            .map(|(index, lyndon)| {
                let bracketing = standard_bracketing(&lyndon);
                let expansion = bracketing.expand(rank, field);
                LieBasisElement {
                    degree: lyndon.len(),
                    multidegree: lyndon.multidegree(rank),
                    lyndon,
                    bracketing,
                    expansion,
                    index,
                }
            })
            .collect();
        Ok(LieBasis { rank, field, tie_break, elements })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn tie_break(&self) -> TieBreak {
        self.tie_break
    }

    pub fn elements(&self) -> &[LieBasisElement] {
        &self.elements
    }

    pub fn max_degree(&self) -> usize {
        self.elements.first().map(|e| e.degree).unwrap_or(0)
    }
}

/// A nondecreasing product of Lie basis elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CorrectWord {
    pub factors: Vec<usize>,
    pub weight: usize,
}

impl CorrectWord {
    pub fn new(factors: Vec<usize>, basis: &LieBasis) -> Self {
        let weight = factors.iter().map(|&i| basis.elements[i].degree).sum::<usize>() + 1 - factors.len();
        CorrectWord { factors, weight }
    }

    pub fn expand(&self, basis: &LieBasis) -> NcPoly {
        self.factors
            .iter()
            .fold(NcPoly::one(basis.rank, basis.field), |acc, &i| acc.mul(&basis.elements[i].expansion))
    }

    pub fn describe(&self, basis: &LieBasis) -> String {
        self.factors.iter().map(|&i| format!("{:?}", basis.elements[i].bracketing)).collect::<Vec<_>>().join("*")
    }
}

/// Weight of a polynomial; the zero polynomial has infinite weight.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Infinite => write!(f, "inf"),
        }
    }
}

/// Correct words with the given multidegree. `basis` must reach degree `d.total()`.
pub fn correct_words(basis: &LieBasis, d: &MultiDegree) -> Result<Vec<CorrectWord>, PbwError> {
    if d.total() == 0 {
        return Err(PbwError::ZeroMultiDegree);
    }
    assert!(basis.max_degree() >= d.total() as usize, "Lie basis too short for {d}");
    fn rec(basis: &LieBasis, start: usize, left: &MultiDegree, cur: &mut Vec<usize>, out: &mut Vec<CorrectWord>) {
        if left.total() == 0 {
            out.push(CorrectWord::new(cur.clone(), basis));
            return;
        }
        for i in start..basis.elements.len() {
            let e = &basis.elements[i];
            if let Some(rest) = left.checked_sub(&e.multidegree) {
                cur.push(i);
                rec(basis, i, &rest, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(basis, 0, d, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Coefficients of a polynomial in the correct-word basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwDecomposition {
    pub coefficients: BTreeMap<CorrectWord, Scalar>,
}

impl PbwDecomposition {
    pub fn weight(&self) -> Weight {
        self.coefficients.keys().map(|w| Weight::Finite(w.weight)).min().unwrap_or(Weight::Infinite)
    }

    pub fn expand(&self, basis: &LieBasis) -> NcPoly {
        self.coefficients
            .iter()
            .fold(NcPoly::zero(basis.rank, basis.field), |acc, (w, c)| acc.add(&w.expand(basis).scale(c)))
    }
}

/// Per-multidegree change of basis from words to correct words.
struct Component {
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    correct: Vec<CorrectWord>,
    /// `[M^T | I]` reduced: row `i` holds the coordinates of word `i` in the correct-word basis.
    inverse: Vec<Vec<Scalar>>,
}

/// Decomposes polynomials into correct words; caches one solved system per multidegree.
pub struct PbwEngine {
    basis: LieBasis,
    components: std::sync::Mutex<HashMap<MultiDegree, std::sync::Arc<Component>>>,
}

impl PbwEngine {
    pub fn new(rank: usize, max_degree: usize, field: FieldSpec) -> Result<Self, PbwError> {
        Self::with_tie_break(rank, max_degree, field, TieBreak::Lex)
    }

    pub fn with_tie_break(rank: usize, max_degree: usize, field: FieldSpec, tie: TieBreak) -> Result<Self, PbwError> {
        Ok(PbwEngine {
            basis: LieBasis::with_tie_break(rank, max_degree, field, tie)?,
            components: Default::default(),
        })
    }

    pub fn basis(&self) -> &LieBasis {
        &self.basis
    }

    fn component(&self, d: &MultiDegree) -> std::sync::Arc<Component> {
        if let Some(c) = self.components.lock().unwrap().get(d) {
            return c.clone();
        }
        let field = self.basis.field;
        let words = words_of_multidegree(d);
        let index: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let correct = correct_words(&self.basis, d).expect("nonzero multidegree");
        let n = words.len();
        assert_eq!(correct.len(), n, "correct words must form a basis of {d}");
        // Row j of the augmented system: expansion of correct word j, then e_j.
        // Reducing gives, in row i, word_i expressed in correct words.
        let rows: Vec<SparseRow> = correct
            .iter()
            .enumerate()
            .map(|(j, cw)| {
                let e = cw.expand(&self.basis);
                let mut r: SparseRow = e.terms().iter().map(|(w, c)| (index[w], c.clone())).collect();
                r.push((n + j, field.one()));
                r
            })
            .collect();
        let rref = Rref::from_rows(field, 2 * n, rows.iter());
        if rref.rank() != n || rref.pivots().iter().enumerate().any(|(i, &p)| p != i) {
            panic!("correct-word expansion matrix is singular at {d}: PBW basis property violated");
        }
        let inverse = rref.rows().iter().map(|r| r[n..].to_vec()).collect();
        let comp = std::sync::Arc::new(Component { words, index, correct, inverse });
        self.components.lock().unwrap().insert(d.clone(), comp.clone());
        comp
    }

    pub fn correct_words(&self, d: &MultiDegree) -> Vec<CorrectWord> {
        self.component(d).correct.clone()
    }

    pub fn words(&self, d: &MultiDegree) -> Vec<Word> {
        self.component(d).words.clone()
    }

    pub fn decompose(&self, f: &NcPoly) -> Result<PbwDecomposition, PbwError> {
        if f.rank() > MAX_RANK {
            return Err(PbwError::RankTooLarge(f.rank()));
        }
        let field = self.basis.field;
        let mut coefficients = BTreeMap::new();
        for (d, part) in f.multihomo_split() {
            if d.total() == 0 {
                let c = part.coeff(&Word::unit());
                coefficients.insert(CorrectWord { factors: vec![], weight: 1 }, c);
                continue;
            }
            let comp = self.component(&d.widen(self.basis.rank));
            let n = comp.words.len();
            let mut acc = vec![field.zero(); n];
            for (w, c) in part.terms() {
                let row = &comp.inverse[comp.index[w]];
                for (j, a) in row.iter().enumerate() {
                    if !a.is_zero() {
                        acc[j] = acc[j].add(&c.mul(a));
                    }
                }
            }
            for (j, a) in acc.into_iter().enumerate() {
                if !a.is_zero() {
                    coefficients.insert(comp.correct[j].clone(), a);
                }
            }
        }
        Ok(PbwDecomposition { coefficients })
    }

    pub fn weight(&self, f: &NcPoly) -> Result<Weight, PbwError> {
        Ok(self.decompose(f)?.weight())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> FieldSpec {
        FieldSpec::Q
    }

    fn p(s: &str, rank: usize) -> NcPoly {
        NcPoly::parse(s, rank, q()).unwrap()
    }

    #[test]
    fn rank2_degree2_order() {
        let b = LieBasis::new(2, 2, q()).unwrap();
        let names: Vec<_> = b.elements().iter().map(|e| format!("{:?}", e.bracketing)).collect();
        assert_eq!(names, vec!["[x,y]", "x", "y"]);
    }

    #[test]
    fn lyndon_counts_match_witt() {
        for r in 1..=3usize {
            let words = lyndon_words(r, 7);
            for n in 1..=7usize {
                let count = words.iter().filter(|w| w.len() == n).count() as u64;
                assert_eq!(count, witt_dimension(r as u64, n as u64), "r={r} n={n}");
            }
        }
        let b = LieBasis::new(2, 3, q()).unwrap();
        let deg3: Vec<_> = b.elements().iter().filter(|e| e.degree == 3).map(|e| format!("{:?}", e.lyndon)).collect();
        assert_eq!(deg3, vec!["xxy", "xyy"]);
        let b = LieBasis::new(3, 2, q()).unwrap();
        assert_eq!(b.elements().iter().filter(|e| e.degree == 2).count(), 3);
    }

    #[test]
    fn rejects_rank_four() {
        assert_eq!(LieBasis::new(4, 2, q()).unwrap_err(), PbwError::RankTooLarge(4));
    }

    #[test]
    fn expansions_are_proper_and_homogeneous() {
        let b = LieBasis::new(3, 5, q()).unwrap();
        for e in b.elements() {
            assert_eq!(e.expansion.multidegree(), Some(e.multidegree.clone()));
            if e.degree >= 2 {
                assert!(e.expansion.is_proper());
            }
        }
    }

    #[test]
    fn correct_word_examples() {
        let b = LieBasis::new(2, 4, q()).unwrap();
        let cw = correct_words(&b, &MultiDegree(vec![1, 1])).unwrap();
        let names: Vec<_> = cw.iter().map(|w| w.describe(&b)).collect();
        assert_eq!(names, vec!["[x,y]", "x*y"]);
        assert_eq!(correct_words(&b, &MultiDegree(vec![2, 0])).unwrap().len(), 1);
        assert_eq!(correct_words(&b, &MultiDegree(vec![0, 0])), Err(PbwError::ZeroMultiDegree));
        let b3 = LieBasis::new(3, 3, q()).unwrap();
        assert_eq!(correct_words(&b3, &MultiDegree(vec![1, 1, 1])).unwrap().len(), 6);
    }

    #[test]
    fn correct_word_counts_equal_multinomials() {
        let b = LieBasis::new(3, 7, q()).unwrap();
        for t in 1..=7 {
            for d in MultiDegree::with_total(3, t) {
                assert_eq!(correct_words(&b, &d).unwrap().len() as u128, d.multinomial(), "{d}");
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let eng = PbwEngine::new(2, 4, q()).unwrap();
        let b = eng.basis();
        let dec = eng.decompose(&p("y*x", 2)).unwrap();
        let shown: Vec<_> = dec.coefficients.iter().map(|(w, c)| (w.describe(b), c.to_string())).collect();
        assert_eq!(shown, vec![("[x,y]".to_string(), "-1".to_string()), ("x*y".to_string(), "1".to_string())]);
        let dec = eng.decompose(&p("[x,y]", 2)).unwrap();
        assert_eq!(dec.coefficients.len(), 1);
        let dec = eng.decompose(&p("x*y", 2)).unwrap();
        assert_eq!(dec.coefficients.keys().next().unwrap().describe(b), "x*y");
    }

    #[test]
    fn weight_examples() {
        let eng = PbwEngine::new(2, 8, q()).unwrap();
        assert_eq!(eng.weight(&p("x*y", 2)).unwrap(), Weight::Finite(1));
        assert_eq!(eng.weight(&p("[x,y]", 2)).unwrap(), Weight::Finite(2));
        for m in 1..=4u32 {
            let f = p("[x,y]", 2).pow(m);
            assert_eq!(eng.weight(&f).unwrap(), Weight::Finite(m as usize + 1));
        }
        assert_eq!(eng.weight(&NcPoly::zero(2, q())).unwrap(), Weight::Infinite);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn poly(rank: usize, max_len: usize) -> impl Strategy<Value = NcPoly> {
            proptest::collection::vec((proptest::collection::vec(0..rank, 0..=max_len), -3i64..=3), 1..6).prop_map(
                move |terms| {
                    let terms = terms.into_iter().map(|(w, c)| (Word::from_letters(&w), FieldSpec::Q.from_i64(c)));
                    NcPoly::from_terms(rank, FieldSpec::Q, terms).unwrap()
                },
            )
        }

        fn homogeneous(rank: usize, len: usize) -> impl Strategy<Value = NcPoly> {
            proptest::collection::vec((proptest::collection::vec(0..rank, len), -3i64..=3), 1..5).prop_map(
                move |terms| {
                    let terms = terms.into_iter().map(|(w, c)| (Word::from_letters(&w), FieldSpec::Q.from_i64(c)));
                    NcPoly::from_terms(rank, FieldSpec::Q, terms).unwrap()
                },
            )
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn roundtrip(f in poly(3, 6)) {
                let eng = PbwEngine::new(3, 6, FieldSpec::Q).unwrap();
                let dec = eng.decompose(&f).unwrap();
                prop_assert_eq!(dec.expand(eng.basis()), f);
            }

            #[test]
            fn weight_is_submultiplicative(f in homogeneous(3, 2), g in homogeneous(3, 3)) {
                let eng = PbwEngine::new(3, 5, FieldSpec::Q).unwrap();
                let (wf, wg) = (eng.weight(&f).unwrap(), eng.weight(&g).unwrap());
                let wfg = eng.weight(&f.mul(&g)).unwrap();
                if let (Weight::Finite(a), Weight::Finite(b)) = (wf, wg) {
                    prop_assert!(wfg >= Weight::Finite(a + b - 1));
                }
            }

            #[test]
            fn derivation_raises_weight(
                terms in proptest::collection::vec((proptest::collection::vec(0usize..4, 1..3), -3i64..=3), 1..4),
                i in 0usize..3,
            ) {
                let eng = PbwEngine::new(3, 7, FieldSpec::Q).unwrap();
                // products of degree-2 and degree-3 Lie elements are proper
                let lie: Vec<&LieBasisElement> = eng.basis().elements().iter().filter(|e| (2..=3).contains(&e.degree)).take(4).collect();
                let proper = terms.iter().fold(NcPoly::zero(3, FieldSpec::Q), |acc, (idx, c)| {
                    let prod = idx.iter().fold(NcPoly::one(3, FieldSpec::Q), |p, &k| p.mul(&lie[k].expansion));
                    acc.add(&prod.scale(&FieldSpec::Q.from_i64(*c)))
                });
                prop_assert!(proper.is_proper());
                let wf = eng.weight(&proper).unwrap();
                let wd = eng.weight(&proper.commutator(&NcPoly::var(3, FieldSpec::Q, i))).unwrap();
                if let Weight::Finite(a) = wf {
                    prop_assert!(wd >= Weight::Finite(a + 1));
                }
            }
        }
    }
}
