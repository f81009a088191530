//! Closed-form model of the two-generated algebra with `[x, y, z] = 0`.
//!
//! In that algebra `c = [x, y]` is central and `c² = 0`, and every element
//! is uniquely `u + c·v` with `u, v` commutative polynomials in `x, y`
//! (ordered monomials `x^a y^b`). The commutator ideal is one-dimensional
//! in every bidegree, spanned by `f(q1, q2) = [x, y] x^{q1-1} y^{q2-1}`.
//!
//! The module also covers T-consequences inside the commutator ideal, the
//! coefficient produced by a linearize-and-substitute pattern, and
//! T-spaces of the commutative polynomial ring.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::freealg::{NcPoly, Word};
use crate::scalars::{binomial_int, power_of, FieldSpec, Rational, Scalar, ScalarError};
use crate::tgrade::{Part, Pattern};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum F23Error {
    #[error("expected a polynomial in two generators, got rank {0}")]
    RankNotTwo(usize),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("element is not bihomogeneous")]
    NotHomogeneous,
    #[error("element is not in the commutator ideal")]
    OutsideCommutatorIdeal,
    #[error("pattern does not match source bidegree ({q1},{q2})")]
    InconsistentPattern { q1: u32, q2: u32 },
    #[error("resource cap exceeded: {what} (limit {limit})")]
    CapExceeded { what: String, limit: u64 },
}

/// Exponent pair `(a, b)` of the ordered monomial `x^a y^b`.
pub type Exp = (u32, u32);

/// A commutative polynomial in `x, y`.
pub type CommPoly = BTreeMap<Exp, Scalar>;

fn comm_add_term(p: &mut CommPoly, e: Exp, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match p.get_mut(&e) {
        Some(s) => {
            *s = s.add(&c);
            if s.is_zero() {
                p.remove(&e);
            }
        }
        None => {
            p.insert(e, c);
        }
    }
}

fn comm_mul(a: &CommPoly, b: &CommPoly, out: &mut CommPoly) {
    for (&(i, j), x) in a {
        for (&(k, l), y) in b {
            comm_add_term(out, (i + k, j + l), x.mul(y));
        }
    }
}

/// `u + c·v` with `c = [x, y]` central and `c² = 0`.
#[derive(Clone, PartialEq, Eq)]
pub struct F23Element {
    field: FieldSpec,
    u: CommPoly,
    v: CommPoly,
}

impl F23Element {
    pub fn zero(field: FieldSpec) -> Self {
        F23Element { field, u: CommPoly::new(), v: CommPoly::new() }
    }

    pub fn one(field: FieldSpec) -> Self {
        Self::monomial(field, (0, 0))
    }

    /// The ordered monomial `x^a y^b`.
    pub fn monomial(field: FieldSpec, e: Exp) -> Self {
        let mut u = CommPoly::new();
        u.insert(e, field.one());
        F23Element { field, u, v: CommPoly::new() }
    }

    /// `c·x^a y^b`.
    pub fn commutator_monomial(field: FieldSpec, e: Exp) -> Self {
        let mut v = CommPoly::new();
        v.insert(e, field.one());
        F23Element { field, u: CommPoly::new(), v }
    }

    pub fn from_parts(field: FieldSpec, u: CommPoly, v: CommPoly) -> Result<Self, F23Error> {
        for c in u.values().chain(v.values()) {
            if !field.contains(c) {
                return Err(ScalarError::FieldMismatch(field.characteristic(), c.characteristic()).into());
            }
        }
        let clean = |p: CommPoly| p.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(F23Element { field, u: clean(u), v: clean(v) })
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn u(&self) -> &CommPoly {
        &self.u
    }

    pub fn v(&self) -> &CommPoly {
        &self.v
    }

    pub fn is_zero(&self) -> bool {
        self.u.is_empty() && self.v.is_empty()
    }

    /// The bidegree if the element is nonzero and bihomogeneous; `c·x^a y^b`
    /// has bidegree `(a + 1, b + 1)`.
    pub fn bidegree(&self) -> Option<Exp> {
        let mut it = self.u.keys().copied().chain(self.v.keys().map(|&(a, b)| (a + 1, b + 1)));
        let first = it.next()?;
        it.all(|e| e == first).then_some(first)
    }

    /// Bihomogeneous components.
    pub fn split(&self) -> BTreeMap<Exp, F23Element> {
        let mut out: BTreeMap<Exp, F23Element> = BTreeMap::new();
        for (&e, c) in &self.u {
            out.entry(e).or_insert_with(|| Self::zero(self.field)).u.insert(e, c.clone());
        }
        for (&(a, b), c) in &self.v {
            out.entry((a + 1, b + 1)).or_insert_with(|| Self::zero(self.field)).v.insert((a, b), c.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.field, other.field, "field mismatch");
        let mut out = self.clone();
        for (&e, c) in &other.u {
            comm_add_term(&mut out.u, e, c.clone());
        }
        for (&e, c) in &other.v {
            comm_add_term(&mut out.v, e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&self.field.from_i64(-1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let f = |p: &CommPoly| p.iter().map(|(e, c)| (*e, c.mul(s))).filter(|(_, c)| !c.is_zero()).collect();
        F23Element { field: self.field, u: f(&self.u), v: f(&self.v) }
    }

    /// `(u1 + c v1)(u2 + c v2) = u1 u2 + c (u1 v2 + v1 u2 + δ(u1, u2))` with
    /// `δ(x^a y^b, x^k y^l) = -b k x^{a+k-1} y^{b+l-1}`, which is what moving
    /// `x^k` to the left of `y^b` costs.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.field, other.field, "field mismatch");
        let mut u = CommPoly::new();
        comm_mul(&self.u, &other.u, &mut u);
        let mut v = CommPoly::new();
        comm_mul(&self.u, &other.v, &mut v);
        comm_mul(&self.v, &other.u, &mut v);
        for (&(a, b), x) in &self.u {
            for (&(k, l), y) in &other.u {
                if b > 0 && k > 0 {
                    let coef = self.field.from_i64(-((b as i64) * (k as i64)));
                    comm_add_term(&mut v, (a + k - 1, b + l - 1), coef.mul(x).mul(y));
                }
            }
        }
        F23Element { field: self.field, u, v }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// A preimage in the free algebra: `x^a y^b` for the monomial part and
    /// `[x, y] x^a y^b` for the commutator part.
    pub fn lift(&self) -> NcPoly {
        let f = self.field;
        let word = |a: u32, b: u32| {
            let letters: Vec<usize> = std::iter::repeat_n(0, a as usize).chain(std::iter::repeat_n(1, b as usize)).collect();
            NcPoly::word(2, f, &letters)
        };
        let c = NcPoly::var(2, f, 0).commutator(&NcPoly::var(2, f, 1));
        let mut out = NcPoly::zero(2, f);
        for (&(a, b), s) in &self.u {
            out = out.add(&word(a, b).scale(s));
        }
        for (&(a, b), s) in &self.v {
            out = out.add(&c.mul(&word(a, b)).scale(s));
        }
        out
    }

    /// Text in the polynomial grammar.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mono = |a: u32, b: u32| {
            let mut parts = Vec::new();
            match a {
                0 => {}
                1 => parts.push("x".to_string()),
                _ => parts.push(format!("x^{a}")),
            }
            match b {
                0 => {}
                1 => parts.push("y".to_string()),
                _ => parts.push(format!("y^{b}")),
            }
            parts
        };
        let mut terms: Vec<(String, Vec<String>)> = Vec::new();
        for (&(a, b), s) in &self.u {
            terms.push((s.to_signed_string(), mono(a, b)));
        }
        for (&(a, b), s) in &self.v {
            let mut m = vec!["[x,y]".to_string()];
            m.extend(mono(a, b));
            terms.push((s.to_signed_string(), m));
        }
        let mut out = String::new();
        for (i, (coef, factors)) in terms.into_iter().enumerate() {
            let (neg, mag) = match coef.strip_prefix('-') {
                Some(m) => (true, m.to_string()),
                None => (false, coef),
            };
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = if mag.contains('/') { format!("({mag})") } else { mag };
            let body = factors.join("*");
            match (mag.as_str(), body.is_empty()) {
                ("1", false) => out.push_str(&body),
                (_, true) => out.push_str(&mag),
                _ => out.push_str(&format!("{mag}*{body}")),
            }
        }
        out
    }
}

impl fmt::Debug for F23Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

impl fmt::Display for F23Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// Image of a rank-2 polynomial in the model.
pub fn f23_reduce(f: &NcPoly) -> Result<F23Element, F23Error> {
    if f.rank() != 2 {
        return Err(F23Error::RankNotTwo(f.rank()));
    }
    let field = f.field();
    let gens = [F23Element::monomial(field, (1, 0)), F23Element::monomial(field, (0, 1))];
    let mut out = F23Element::zero(field);
    for (w, c) in f.terms() {
        let mut acc = F23Element::one(field);
        for l in w.letters() {
            acc = acc.mul(&gens[l]);
        }
        out = out.add(&acc.scale(c));
    }
    Ok(out)
}

pub fn f23_commutator(a: &F23Element, b: &F23Element) -> F23Element {
    a.commutator(b)
}

/// `f(q1, q2) = [x, y] x^{q1-1} y^{q2-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialPoly {
    pub q1: u32,
    pub q2: u32,
    pub element: F23Element,
    pub special: bool,
}

/// Whether both exponents are positive powers of the characteristic.
pub fn is_special(q1: u32, q2: u32, field: FieldSpec) -> bool {
    let p = field.characteristic();
    p != 0 && [q1, q2].iter().all(|&q| power_of(q as u64, p).is_some_and(|s| s >= 1))
}

pub fn special_poly(q1: u32, q2: u32, field: FieldSpec) -> SpecialPoly {
    assert!(q1 >= 1 && q2 >= 1, "f(q1, q2) needs positive exponents");
    SpecialPoly {
        q1,
        q2,
        element: F23Element::commutator_monomial(field, (q1 - 1, q2 - 1)),
        special: is_special(q1, q2, field),
    }
}

impl SpecialPoly {
    /// `f(q1, q2) ⪯ f(q1', q2')` iff `q1 <= q1'` and `q2 <= q2'`.
    pub fn precedes(&self, other: &SpecialPoly) -> bool {
        self.q1 <= other.q1 && self.q2 <= other.q2
    }
}

/// `x ↦ Σ u_i` with `u_i = x^{a_i} y^{b_i}` taken `n_i` times, and likewise
/// for `y`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubstitutionPattern {
    pub parts_x: Vec<(u32, Exp)>,
    pub parts_y: Vec<(u32, Exp)>,
}

impl SubstitutionPattern {
    pub fn source(&self) -> Exp {
        (self.parts_x.iter().map(|p| p.0).sum(), self.parts_y.iter().map(|p| p.0).sum())
    }

    pub fn target(&self) -> Exp {
        let (mut r1, mut r2) = (0, 0);
        for &(n, (a, b)) in self.parts_x.iter().chain(&self.parts_y) {
            r1 += n * a;
            r2 += n * b;
        }
        (r1, r2)
    }

    fn side_sum(parts: &[(u32, Exp)]) -> (i64, i64) {
        parts.iter().fold((0, 0), |(s, t), &(n, (a, b))| (s + (n * a) as i64, t + (n * b) as i64))
    }

    fn check(&self, q1: u32, q2: u32) -> Result<(), F23Error> {
        let ok = self.source() == (q1, q2) && self.parts_x.iter().chain(&self.parts_y).all(|p| p.0 >= 1);
        if ok {
            Ok(())
        } else {
            Err(F23Error::InconsistentPattern { q1, q2 })
        }
    }

    /// The same substitution as a word pattern for the lifted generator.
    pub fn as_word_pattern(&self) -> Pattern {
        let side = |parts: &[(u32, Exp)]| {
            parts
                .iter()
                .map(|&(n, (a, b))| {
                    let letters: Vec<usize> =
                        std::iter::repeat_n(0, a as usize).chain(std::iter::repeat_n(1, b as usize)).collect();
                    Part { mult: n, word: Word::from_letters(&letters) }
                })
                .collect()
        };
        vec![side(&self.parts_x), side(&self.parts_y)]
    }
}

impl fmt::Display for SubstitutionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |parts: &[(u32, Exp)]| {
            parts.iter().map(|(n, (a, b))| format!("{n}×x^{a}y^{b}")).collect::<Vec<_>>().join(" + ")
        };
        write!(f, "x -> {}; y -> {}", side(&self.parts_x), side(&self.parts_y))
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `N / (n_1 ⋯ n_k)` with `N = (q-1)! / Π (n_i - 1)!`, i.e. `(q-1)! / Π n_i!`.
fn side_factor(parts: &[(u32, Exp)], q: u32) -> BigRational {
    let den = parts.iter().fold(BigInt::one(), |acc, p| acc * factorial(p.0));
    BigRational::new(factorial(q - 1), den)
}

fn side_factor_of_mults(mults: &[u32], q: u32) -> BigRational {
    let den = mults.iter().fold(BigInt::one(), |acc, &n| acc * factorial(n));
    BigRational::new(factorial(q - 1), den)
}

/// The scalar `L` with `η(f(q1, q2)^σ) = L f(r1, r2)`, from the closed
/// formula `L = det[(a, b), (c, d)] · N1/(n_1⋯n_k) · N2/(m_1⋯m_l)` where
/// `(a, b) = Σ n_i (a_i, b_i)` and `(c, d) = Σ m_j (c_j, d_j)`.
pub fn consequence_coefficient(pattern: &SubstitutionPattern, q1: u32, q2: u32) -> Result<Rational, F23Error> {
    pattern.check(q1, q2)?;
    let (a, b) = SubstitutionPattern::side_sum(&pattern.parts_x);
    let (c, d) = SubstitutionPattern::side_sum(&pattern.parts_y);
    let det = BigRational::from_integer(BigInt::from(a * d - b * c));
    Ok(Rational::from_big(det * side_factor(&pattern.parts_x, q1) * side_factor(&pattern.parts_y, q2)))
}

/// Multinomial `(Σk)! / Π k_i!`, zero when an entry is negative.
fn multinomial(ks: &[i64]) -> BigInt {
    if ks.iter().any(|&k| k < 0) {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    let mut total = 0u64;
    for &k in ks {
        total += k as u64;
        acc *= binomial_int(total, k as u64);
    }
    acc
}

/// The same coefficient by expanding the instance term by term: `[X, Y]`
/// contributes `det(u_i, v_j)` for each pair of parts, and the trailing
/// `X^{q1-1} Y^{q2-1}` (whose commutator part is annihilated by `c`) the
/// number of ways to use the remaining parts.
pub fn instance_coefficient(pattern: &SubstitutionPattern, q1: u32, q2: u32) -> Result<BigInt, F23Error> {
    pattern.check(q1, q2)?;
    let nx: Vec<i64> = pattern.parts_x.iter().map(|p| p.0 as i64).collect();
    let ny: Vec<i64> = pattern.parts_y.iter().map(|p| p.0 as i64).collect();
    let mut total = BigInt::zero();
    for (i, &(_, (a, b))) in pattern.parts_x.iter().enumerate() {
        let mut kx = nx.clone();
        kx[i] -= 1;
        let mx = multinomial(&kx);
        for (j, &(_, (c, d))) in pattern.parts_y.iter().enumerate() {
            let det = a as i64 * d as i64 - b as i64 * c as i64;
            if det == 0 {
                continue;
            }
            let mut ky = ny.clone();
            ky[j] -= 1;
            total += BigInt::from(det) * &mx * multinomial(&ky);
        }
    }
    Ok(total)
}

/// Nonincreasing partitions of `q`.
pub fn partitions(q: u32) -> Vec<Vec<u32>> {
    fn rec(left: u32, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for n in (1..=cap.min(left)).rev() {
            cur.push(n);
            rec(left - n, n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(q, q, &mut Vec::new(), &mut out);
    out
}

/// Options for pattern enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatternRules {
    /// Allow the unit monomial as a substituted value.
    pub allow_unit: bool,
    /// Require the monomials of one side to be pairwise distinct.
    pub distinct: bool,
    /// Upper bound on each exponent of a substituted monomial.
    pub max_exponent: Option<u32>,
}

/// Callback receiving one side's parts and the exponent they use.
pub type SideVisitor<'a> = dyn FnMut(&[(u32, Exp)], Exp) -> ControlFlow<()> + 'a;

/// Calls `visit` with every side (list of `(multiplicity, monomial)` in
/// canonical order) using `q` occurrences whose weighted exponent sum is
/// at most `bound` componentwise.
pub fn for_each_side(
    q: u32,
    bound: Exp,
    rules: PatternRules,
    visit: &mut SideVisitor,
) -> ControlFlow<()> {
    fn rec(
        left: u32,
        cap: u32,
        used: Exp,
        bound: Exp,
        rules: PatternRules,
        cur: &mut Vec<(u32, Exp)>,
        visit: &mut SideVisitor,
    ) -> ControlFlow<()> {
        if left == 0 {
            return visit(cur, used);
        }
        for n in (1..=cap.min(left)).rev() {
            let amax = (bound.0 - used.0) / n;
            let bmax = (bound.1 - used.1) / n;
            let (amax, bmax) = match rules.max_exponent {
                Some(m) => (amax.min(m), bmax.min(m)),
                None => (amax, bmax),
            };
            for a in 0..=amax {
                for b in 0..=bmax {
                    let e = (a, b);
                    if e == (0, 0) && !rules.allow_unit {
                        continue;
                    }
                    if let Some(&(pn, pe)) = cur.last() {
                        if pn == n && (e < pe || (rules.distinct && e == pe)) {
                            continue;
                        }
                    }
                    if rules.distinct && cur.iter().any(|p| p.1 == e) {
                        continue;
                    }
                    cur.push((n, e));
                    let flow = rec(left - n, n, (used.0 + n * a, used.1 + n * b), bound, rules, cur, visit);
                    cur.pop();
                    flow?;
                }
            }
        }
        ControlFlow::Continue(())
    }
    rec(q, q, (0, 0), bound, rules, &mut Vec::new(), visit)
}

/// Every canonical pattern from source `(q1, q2)` landing exactly on `target`.
pub fn for_each_pattern(
    q1: u32,
    q2: u32,
    target: Exp,
    rules: PatternRules,
    visit: &mut dyn FnMut(&SubstitutionPattern) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let mut ys: HashMap<Exp, Vec<Vec<(u32, Exp)>>> = HashMap::new();
    let _ = for_each_side(q2, target, rules, &mut |side, used| {
        ys.entry(used).or_default().push(side.to_vec());
        ControlFlow::Continue(())
    });
    for_each_side(q1, target, rules, &mut |side, used| {
        let rest = (target.0 - used.0, target.1 - used.1);
        if let Some(list) = ys.get(&rest) {
            for y in list {
                visit(&SubstitutionPattern { parts_x: side.to_vec(), parts_y: y.clone() })?;
            }
        }
        ControlFlow::Continue(())
    })
}

/// Reachable weighted exponent sums for one multiplicity partition, each
/// with one representative list of monomials.
fn reachable(mults: &[u32], bound: Exp, allow_unit: bool) -> HashMap<Exp, Vec<Exp>> {
    let mut reach: HashMap<Exp, Vec<Exp>> = HashMap::new();
    reach.insert((0, 0), Vec::new());
    for &n in mults {
        let mut next: HashMap<Exp, Vec<Exp>> = HashMap::new();
        let mut keys: Vec<&Exp> = reach.keys().collect();
        keys.sort();
        for &s in keys {
            let rep = &reach[&s];
            for a in 0..=(bound.0 - s.0) / n {
                for b in 0..=(bound.1 - s.1) / n {
                    if (a, b) == (0, 0) && !allow_unit {
                        continue;
                    }
                    next.entry((s.0 + n * a, s.1 + n * b)).or_insert_with(|| {
                        let mut r = rep.clone();
                        r.push((a, b));
                        r
                    });
                }
            }
        }
        reach = next;
    }
    reach
}

/// Every distinct value class of the coefficient `L` for patterns from
/// `(q1, q2)` onto `target`: `L` only depends on the two multiplicity
/// partitions and the two weighted exponent sums, so enumerating those
/// covers every pattern. Calls `visit` with a representative pattern and
/// its coefficient.
pub fn for_each_coefficient_class(
    q1: u32,
    q2: u32,
    target: Exp,
    allow_unit: bool,
    visit: &mut dyn FnMut(&SubstitutionPattern, &Rational) -> ControlFlow<()>,
) -> ControlFlow<()> {
    for nx in partitions(q1) {
        let rx = reachable(&nx, target, allow_unit);
        let kx = side_factor_of_mults(&nx, q1);
        for ny in partitions(q2) {
            let ry = reachable(&ny, target, allow_unit);
            let ky = side_factor_of_mults(&ny, q2);
            let mut sums: Vec<&Exp> = rx.keys().collect();
            sums.sort();
            for &(a, b) in sums {
                let (c, d) = (target.0 - a, target.1 - b);
                let Some(rep_y) = ry.get(&(c, d)) else { continue };
                let det = a as i64 * d as i64 - b as i64 * c as i64;
                let l = Rational::from_big(BigRational::from_integer(BigInt::from(det)) * &kx * &ky);
                let pattern = SubstitutionPattern {
                    parts_x: nx.iter().copied().zip(rx[&(a, b)].iter().copied()).collect(),
                    parts_y: ny.iter().copied().zip(rep_y.iter().copied()).collect(),
                };
                visit(&pattern, &l)?;
            }
        }
    }
    ControlFlow::Continue(())
}

/// Outcome of the `L ∈ pZ` check over all patterns between two bidegrees.
#[derive(Clone, Debug)]
pub struct CoefficientCertificate {
    pub classes: u64,
    pub violations: Vec<(SubstitutionPattern, Rational)>,
}

/// Checks that every pattern from `f(q1, q2)` onto `target` with nonunit
/// monomials has `L ∈ pZ`.
pub fn coefficient_certificate(q1: u32, q2: u32, target: Exp, p: u64) -> CoefficientCertificate {
    let mut cert = CoefficientCertificate { classes: 0, violations: Vec::new() };
    let pb = BigInt::from(p);
    let _ = for_each_coefficient_class(q1, q2, target, false, &mut |pat, l| {
        cert.classes += 1;
        let ok = l.is_integer() && (l.numer() % &pb).is_zero();
        if !ok {
            cert.violations.push((pat.clone(), l.clone()));
        }
        ControlFlow::Continue(())
    });
    cert
}

/// A pattern showing that the target is a consequence of one generator.
#[derive(Clone, Debug)]
pub struct Witness {
    pub generator: usize,
    pub pattern: SubstitutionPattern,
    /// The instance equals `coefficient · f(r1, r2)`.
    pub coefficient: Scalar,
}

#[derive(Clone, Debug)]
pub struct Consequence {
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Number of coefficient classes examined; when `holds` is false every
    /// one of them vanished, which is the certificate that the spanning set
    /// of the T-space in the target bidegree is zero.
    pub classes_checked: u64,
}

/// Decides whether `target` lies in the T-space generated by `generators`
/// inside the commutator ideal of the model.
///
/// Substitutions range over all monomials (the unit included); images with
/// a commutator part contribute nothing because `c² = 0`. In one bidegree
/// the commutator ideal is a line, so membership holds iff some instance
/// is nonzero.
pub fn tconsequence(target: &F23Element, generators: &[F23Element], max_classes: u64) -> Result<Consequence, F23Error> {
    let field = target.field;
    if target.is_zero() {
        return Ok(Consequence { holds: true, witness: None, classes_checked: 0 });
    }
    let r = target.bidegree().ok_or(F23Error::NotHomogeneous)?;
    if !target.u.is_empty() {
        return Err(F23Error::OutsideCommutatorIdeal);
    }
    let mut classes = 0u64;
    for (gi, g) in generators.iter().enumerate() {
        if g.field != field {
            return Err(ScalarError::FieldMismatch(field.characteristic(), g.field.characteristic()).into());
        }
        if !g.u.is_empty() {
            return Err(F23Error::OutsideCommutatorIdeal);
        }
        for (&(a, b), gamma) in &g.v {
            let (q1, q2) = (a + 1, b + 1);
            let mut found: Option<Witness> = None;
            let mut over = false;
            let _ = for_each_coefficient_class(q1, q2, r, true, &mut |pat, l| {
                classes += 1;
                if classes > max_classes {
                    over = true;
                    return ControlFlow::Break(());
                }
                let value = field.from_rational(l).map(|s| s.mul(gamma));
                match value {
                    Ok(s) if !s.is_zero() => {
                        found = Some(Witness { generator: gi, pattern: pat.clone(), coefficient: s });
                        ControlFlow::Break(())
                    }
                    _ => ControlFlow::Continue(()),
                }
            });
            if over {
                return Err(F23Error::CapExceeded { what: "coefficient classes".into(), limit: max_classes });
            }
            if let Some(w) = found {
                return Ok(Consequence { holds: true, witness: Some(w), classes_checked: classes });
            }
        }
    }
    Ok(Consequence { holds: false, witness: None, classes_checked: classes })
}

/// Expands a witness in the free algebra and reduces it into the model,
/// returning the instance and whether it equals `coefficient · f(r1, r2)`.
pub fn verify_witness(generator: &F23Element, w: &Witness) -> Result<(F23Element, bool), F23Error> {
    let split = generator.split();
    let q = w.pattern.source();
    let part = split.get(&q).ok_or(F23Error::InconsistentPattern { q1: q.0, q2: q.1 })?;
    let lifted = part.lift();
    let expanded = crate::tgrade::substitution_instance(&lifted, &w.pattern.as_word_pattern(), 2);
    let image = f23_reduce(&expanded)?;
    let (r1, r2) = w.pattern.target();
    let expected = if r1 == 0 || r2 == 0 {
        // the commutator ideal has no component here
        F23Element::zero(generator.field)
    } else {
        F23Element::commutator_monomial(generator.field, (r1 - 1, r2 - 1)).scale(&w.coefficient)
    };
    Ok((image.clone(), image == expected))
}

/// The exponent-divisibility criterion for the T-space of `K[x, y]`
/// generated by `x^q`, `q = p^s`: both exponents divisible by `q`.
pub fn divisible_by_power(target: Exp, q: u64) -> bool {
    (target.0 as u64).is_multiple_of(q) && (target.1 as u64).is_multiple_of(q)
}

/// Adding the parts in base `p` produces no carry, i.e. (Kummer) the
/// multinomial coefficient of the parts is not divisible by `p`.
fn carry_free(parts: &[u32], p: u64) -> bool {
    let mut digits: Vec<u64> = Vec::new();
    for &n in parts {
        let mut n = n as u64;
        let mut i = 0;
        while n > 0 {
            if digits.len() <= i {
                digits.push(0);
            }
            digits[i] += n % p;
            if digits[i] >= p {
                return false;
            }
            n /= p;
            i += 1;
        }
    }
    true
}

/// Membership of `x^a y^b` in the T-space of `K[x, y]` generated by `x^q`
/// over an infinite field of characteristic `p`. The component of
/// `(Σ α_i m_i)^q` for multiplicities `n` is `multinomial(q; n) Π m_i^{n_i}`;
/// the multiplicity partitions with a nonvanishing multinomial are found by
/// Kummer's carry criterion, and the reachable exponent sums of each by
/// dynamic programming.
pub fn comm_tspace_contains(target: Exp, q: u32, p: u64) -> bool {
    partitions(q)
        .into_iter()
        .filter(|n| carry_free(n, p))
        .any(|n| reachable(&n, target, true).contains_key(&target))
}

/// The same membership decided from the spanning set: the component of
/// `(Σ α_i m_i)^q` for multiplicities `n` is `multinomial(q; n) Π m_i^{n_i}`,
/// so `x^a y^b` is in the span iff some pattern with nonvanishing
/// multinomial mod `p` produces it.
pub fn comm_tspace_contains_by_substitution(target: Exp, q: u32, p: u64) -> bool {
    let rules = PatternRules { allow_unit: true, distinct: true, max_exponent: None };
    let pb = BigInt::from(p);
    let mut hit = false;
    let _ = for_each_side(q, target, rules, &mut |side, used| {
        if used == target {
            let ks: Vec<i64> = side.iter().map(|s| s.0 as i64).collect();
            if !(multinomial(&ks) % &pb).is_zero() {
                hit = true;
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    });
    hit
}

/// A pair `(i, j)` with `i + j - 2 = s`, `i, j >= 1` and neither divisible
/// by `p`.
pub fn theorem6_pair(s: u64, p: u64) -> (u64, u64) {
    if !s.is_multiple_of(p) {
        (2, s)
    } else {
        (1, s + 1)
    }
}
