//! The free unital associative algebra `F_r` over `Q` or `F_p`.

mod parse;
mod poly;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::scalars::ScalarError;

pub use parse::ParseError;
pub use poly::{OpKind, Operator, NcPoly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreeAlgError {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("generator {letter} is outside rank {rank}")]
    LetterOutOfRank { letter: usize, rank: usize },
    #[error("a commutator needs at least 2 arguments, got {0}")]
    TooFewArguments(usize),
    #[error("expected {expected} substitution images, got {got}")]
    ImageCount { expected: usize, got: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// A word in the generators `0..rank`; the empty word is the unit.
///
/// Words are ordered by length first and lexicographically within a length.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn unit() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: usize) -> Self {
        Word(vec![i as u8])
    }

    pub fn from_letters(letters: &[usize]) -> Self {
        Word(letters.iter().map(|&l| l as u8).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&l| l as usize)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn max_letter(&self) -> Option<usize> {
        self.0.iter().max().map(|&l| l as usize)
    }

    pub fn multidegree(&self, rank: usize) -> MultiDegree {
        let mut e = vec![0u32; rank];
        for l in self.letters() {
            e[l] += 1;
        }
        MultiDegree(e)
    }

    pub fn count(&self, letter: usize) -> usize {
        self.0.iter().filter(|&&l| l as usize == letter).count()
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for l in self.letters() {
            write!(f, "{}", letter_name(l, 4))?;
        }
        Ok(())
    }
}

/// Exponent vector of a multihomogeneous component, one entry per generator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct MultiDegree(pub Vec<u32>);

impl MultiDegree {
    pub fn zero(rank: usize) -> Self {
        MultiDegree(vec![0; rank])
    }

    pub fn unit(rank: usize, i: usize) -> Self {
        let mut e = vec![0; rank];
        e[i] = 1;
        MultiDegree(e)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn add(&self, other: &MultiDegree) -> MultiDegree {
        MultiDegree(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, or `None` if some entry would go negative.
    pub fn checked_sub(&self, other: &MultiDegree) -> Option<MultiDegree> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiDegree)
    }

    pub fn leq(&self, other: &MultiDegree) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Number of words with this multidegree.
    pub fn multinomial(&self) -> u128 {
        let mut acc: u128 = 1;
        let mut n: u128 = 0;
        for &e in &self.0 {
            for i in 1..=e as u128 {
                n += 1;
                acc = acc * n / i;
            }
        }
        acc
    }

    /// All multidegrees `e <= self` (componentwise), in lexicographic order.
    pub fn below(&self) -> Vec<MultiDegree> {
        let mut out = vec![Vec::new()];
        for &b in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix: Vec<u32>| {
                    (0..=b).map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(MultiDegree).collect()
    }

    /// All multidegrees of the given rank with the given total degree.
    pub fn with_total(rank: usize, total: u32) -> Vec<MultiDegree> {
        fn rec(rank: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiDegree>) {
            if prefix.len() + 1 == rank {
                prefix.push(left);
                out.push(MultiDegree(prefix.clone()));
                prefix.pop();
                return;
            }
            for v in (0..=left).rev() {
                prefix.push(v);
                rec(rank, left - v, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if rank == 0 {
            if total == 0 {
                out.push(MultiDegree(Vec::new()));
            }
            return out;
        }
        rec(rank, total, &mut Vec::new(), &mut out);
        out
    }

    /// Same exponents padded with zeros up to `rank`.
    pub fn widen(&self, rank: usize) -> MultiDegree {
        let mut e = self.0.clone();
        e.resize(rank.max(e.len()), 0);
        MultiDegree(e)
    }
}

impl fmt::Display for MultiDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All words of multidegree `d`, in canonical (lexicographic) order.
pub fn words_of_multidegree(d: &MultiDegree) -> Vec<Word> {
    fn rec(left: &mut Vec<u32>, cur: &mut Vec<u8>, remaining: u32, out: &mut Vec<Word>) {
        if remaining == 0 {
            out.push(Word(cur.clone()));
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                left[i] -= 1;
                cur.push(i as u8);
                rec(left, cur, remaining - 1, out);
                cur.pop();
                left[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    let mut left = d.0.clone();
    rec(&mut left, &mut Vec::new(), d.total(), &mut out);
    out
}

/// Display name of generator `i` in an algebra of the given rank.
pub fn letter_name(i: usize, rank: usize) -> String {
    if rank <= 4 {
        ["x", "y", "z", "t"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}
