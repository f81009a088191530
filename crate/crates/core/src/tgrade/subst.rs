//! Enumeration of substitution instances for T-space generators.
//!
//! Over an infinite field the T-space generated by a multihomogeneous `g` is
//! spanned by the multihomogeneous components of `g(Σ α_i u_i, Σ β_j v_j, …)`
//! with `u_i, v_j` words (the unit included). The component indexed by the
//! exponents of the `α`s and `β`s is `g` with every occurrence of a variable
//! replaced, in all distinguishable ways, by one of its words, where the word
//! `u_i` is used exactly `n_i` times.
//!
//! Two parts of the same variable carrying the same word produce a scalar
//! multiple of the component in which they are merged, so only pairwise
//! distinct words are enumerated, and parts are kept in a canonical order
//! (multiplicity nonincreasing, then words increasing) since the component
//! does not depend on the order of the parts.

use std::collections::HashMap;
use std::ops::ControlFlow;

use crate::freealg::{words_of_multidegree, MultiDegree, NcPoly, Word};
use crate::scalars::Scalar;

/// One share of a variable: `word` used `mult` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub mult: u32,
    pub word: Word,
}

/// A substitution pattern: the parts chosen for every generator variable.
pub type Pattern = Vec<Vec<Part>>;

/// Calls `visit` for every canonical pattern whose instance of the
/// homogeneous polynomial with variable degrees `degrees` lands in `target`.
/// Stops early when `visit` breaks.
pub fn for_each_pattern(
    degrees: &[u32],
    target: &MultiDegree,
    visit: &mut dyn FnMut(&Pattern) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut words_by_degree: HashMap<MultiDegree, Vec<Word>> = HashMap::new();
    for e in target.below() {
        let w = words_of_multidegree(&e);
        words_by_degree.insert(e, w);
    }
    let vars: Vec<usize> = (0..degrees.len()).filter(|&v| degrees[v] > 0).collect();
    let mut pattern: Pattern = vec![Vec::new(); degrees.len()];
    let mut st = Search { degrees, vars: &vars, words: &words_by_degree, visit };
    st.var(0, target.clone(), &mut pattern)
}

struct Search<'a> {
    degrees: &'a [u32],
    vars: &'a [usize],
    words: &'a HashMap<MultiDegree, Vec<Word>>,
    visit: &'a mut dyn FnMut(&Pattern) -> ControlFlow<()>,
}

impl Search<'_> {
    fn var(&mut self, vi: usize, rem: MultiDegree, pattern: &mut Pattern) -> ControlFlow<()> {
        if vi == self.vars.len() {
            if rem.total() == 0 {
                return (self.visit)(pattern);
            }
            return ControlFlow::Continue(());
        }
        let v = self.vars[vi];
        self.part(vi, v, self.degrees[v], self.degrees[v], rem, pattern)
    }

    /// Chooses the next part of variable `v`, which still needs `left`
    /// occurrences, with multiplicity at most `cap`.
    fn part(&mut self, vi: usize, v: usize, left: u32, cap: u32, rem: MultiDegree, pattern: &mut Pattern) -> ControlFlow<()> {
        if left == 0 {
            return self.var(vi + 1, rem, pattern);
        }
        let last_var = vi + 1 == self.vars.len();
        for n in (1..=cap.min(left)).rev() {
            let prev: Option<Word> = pattern[v].last().filter(|p| p.mult == n).map(|p| p.word.clone());
            let closing = last_var && n == left;
            let degs: Vec<MultiDegree> = if closing {
                // the last part must absorb everything that is left
                if rem.0.iter().any(|&e| e % n != 0) {
                    continue;
                }
                vec![MultiDegree(rem.0.iter().map(|&e| e / n).collect())]
            } else {
                MultiDegree(rem.0.iter().map(|&e| e / n).collect()).below()
            };
            for e in degs {
                let Some(words) = self.words.get(&e) else { continue };
                let next_rem = MultiDegree(rem.0.iter().zip(&e.0).map(|(r, x)| r - n * x).collect());
                for w in words {
                    if prev.as_ref().is_some_and(|p| w <= p) {
                        continue;
                    }
                    if pattern[v].iter().any(|p| &p.word == w) {
                        continue;
                    }
                    pattern[v].push(Part { mult: n, word: w.clone() });
                    let flow = self.part(vi, v, left - n, n, next_rem.clone(), pattern);
                    pattern[v].pop();
                    flow?;
                }
            }
        }
        ControlFlow::Continue(())
    }
}

/// The component of `g` selected by `pattern`, as a map from words of the
/// target algebra to coefficients.
pub fn instance(g: &NcPoly, pattern: &Pattern) -> HashMap<Word, Scalar> {
    let mut out: HashMap<Word, Scalar> = HashMap::new();
    let mut counts: Vec<Vec<u32>> = pattern.iter().map(|parts| parts.iter().map(|p| p.mult).collect()).collect();
    for (w, c) in g.terms() {
        let letters: Vec<usize> = w.letters().collect();
        let mut cur: Vec<u8> = Vec::new();
        distribute(&letters, 0, pattern, &mut counts, &mut cur, c, &mut out);
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn distribute(
    letters: &[usize],
    pos: usize,
    pattern: &Pattern,
    counts: &mut Vec<Vec<u32>>,
    cur: &mut Vec<u8>,
    coef: &Scalar,
    out: &mut HashMap<Word, Scalar>,
) {
    if pos == letters.len() {
        let w = Word(cur.clone());
        match out.get_mut(&w) {
            Some(s) => *s = s.add(coef),
            None => {
                out.insert(w, coef.clone());
            }
        }
        return;
    }
    let v = letters[pos];
    for k in 0..pattern[v].len() {
        if counts[v][k] == 0 {
            continue;
        }
        counts[v][k] -= 1;
        let len = cur.len();
        cur.extend_from_slice(&pattern[v][k].word.0);
        distribute(letters, pos + 1, pattern, counts, cur, coef, out);
        cur.truncate(len);
        counts[v][k] += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::FieldSpec;

    fn patterns(degrees: &[u32], target: &[u32]) -> Vec<Pattern> {
        let mut out = Vec::new();
        let _ = for_each_pattern(degrees, &MultiDegree(target.to_vec()), &mut |p| {
            out.push(p.clone());
            ControlFlow::Continue(())
        });
        out
    }

    #[test]
    fn single_variable_square_into_degree_two() {
        // x^2 -> (1,1): only {x, y} each once (a unit part would need a
        // second part of degree (1,1) used once: {1, xy}, {1, yx})
        let ps = patterns(&[2], &[1, 1]);
        let shapes: Vec<Vec<(u32, String)>> =
            ps.iter().map(|p| p[0].iter().map(|q| (q.mult, format!("{:?}", q.word))).collect()).collect();
        assert_eq!(ps.len(), 3, "{shapes:?}");
    }

    #[test]
    fn instance_of_square_is_symmetrized() {
        let f = FieldSpec::Q;
        let g = NcPoly::parse("x^2", 1, f).unwrap();
        let pat = vec![vec![Part { mult: 1, word: Word::letter(0) }, Part { mult: 1, word: Word::letter(1) }]];
        let inst = instance(&g, &pat);
        assert_eq!(inst.len(), 2);
        assert!(inst.values().all(|c| c.is_one()));
    }

    #[test]
    fn multiplicity_counts_arrangements() {
        // x^3 with x -> {x twice, y once}: xxy + xyx + yxx
        let g = NcPoly::parse("x^3", 1, FieldSpec::Q).unwrap();
        let pat = vec![vec![Part { mult: 2, word: Word::letter(0) }, Part { mult: 1, word: Word::letter(1) }]];
        let inst = instance(&g, &pat);
        assert_eq!(inst.len(), 3);
    }

    #[test]
    fn no_duplicate_patterns() {
        let ps = patterns(&[3, 1], &[2, 2]);
        for (i, a) in ps.iter().enumerate() {
            for b in &ps[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert!(!ps.is_empty());
    }
}
