//! Implementations of the catalog checks.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Outcome, Params, VerifyError};
use crate::f23model::{
    coefficient_certificate, comm_tspace_contains, comm_tspace_contains_by_substitution, consequence_coefficient,
    divisible_by_power, f23_reduce, for_each_side, instance_coefficient, special_poly, tconsequence, theorem6_pair,
    verify_witness, PatternRules, SubstitutionPattern,
};
use crate::freealg::{words_of_multidegree, MultiDegree, NcPoly, OpKind, Operator, Word};
use crate::linalg::{kernel_of, EchelonBuilder, SparseRow};
use crate::pbw::{PbwEngine, TieBreak};
use crate::scalars::{binomial, power_of, FieldSpec, Rational};
use crate::tgrade::{Caps, GradedSpan, TEngine};

use num_bigint::BigInt;
use num_rational::BigRational;
use std::ops::ControlFlow;

const MAX_CLASSES: u64 = 50_000_000;

pub(super) fn dispatch(name: &str, p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    match name {
        "identities" => identities(p, out),
        "rank4_counterexample" => rank4_counterexample(p, out),
        "theorem1" => {
            let (m, n) = (p.usize("m")?, p.usize("n")?);
            product_inclusion(3, m, n, m + n - 1, p.field("char")?, p.uint("max_deg")?, out)
        }
        "latyshev" => {
            let (m, n) = (p.usize("m")?, p.usize("n")?);
            product_inclusion(p.usize("rank")?, m, n, m + n - 2, p.field("char")?, p.uint("max_deg")?, out)
        }
        "lemma1_2" => {
            let (m, n) = (p.usize("m")?, p.usize("n")?);
            if m % 2 == 0 && n % 2 == 0 {
                return Err(invalid("m", "one of m, n must be odd"));
            }
            product_inclusion(p.usize("rank")?, m, n, m + n - 1, p.field("char")?, p.uint("max_deg")?, out)
        }
        "lemma1_3" => lemma1_3(p, out),
        "eq1_3" => eq1_3(p, out),
        "corollary1" => corollary1(p, out),
        "theorem2" => theorem2(p, out),
        "corollary2" => corollary2(p, out),
        "lemma2_1" => lemma2_1(p, out),
        "frobenius" => frobenius(p, out),
        "eq3_1" => eq3_1(p, out),
        "theorem3" => theorem3(p, out),
        "theorem4" => theorem4(p, out),
        "corollary3" => corollary3(p, out),
        "sec4_1" => sec4_1(p, out),
        "lemma4_1" => lemma4_1(p, out),
        "lemma4_2" => lemma4_2(p, out),
        "theorem5" => theorem5(p, out),
        "corollary4" => corollary4(p, out),
        "lemma5_1" => lemma5_1(p, out),
        "theorem6_arith" => theorem6_arith(p, out),
        "theorem6_factor" => theorem6_factor(p, out),
        "remark5" => remark5(p, out),
        "kernel" => kernel(p, out),
        "f23_crosscheck" => f23_crosscheck(p, out),
        "tie_break" => tie_break(p, out),
        other => Err(VerifyError::UnknownCheck(other.to_string())),
    }
}

fn invalid(name: &str, reason: impl Into<String>) -> VerifyError {
    VerifyError::InvalidParam { name: name.to_string(), reason: reason.into() }
}

/// An engine with the default caps; requests beyond them surface as
/// `CAP_EXCEEDED` rather than running unbounded.
fn engine(rank: usize, field: FieldSpec) -> TEngine {
    TEngine::with_caps(rank, field, Caps::default())
}

fn degrees(rank: usize, lo: u32, hi: u32) -> Vec<MultiDegree> {
    (lo..=hi).flat_map(|t| MultiDegree::with_total(rank, t)).collect()
}

fn letter(rank: usize, field: FieldSpec, i: usize) -> NcPoly {
    NcPoly::var(rank, field, i)
}

fn word_poly(rank: usize, field: FieldSpec, w: &Word) -> NcPoly {
    NcPoly::monomial(rank, field, w.clone(), field.one())
}

fn words_up_to(rank: usize, lo: u32, hi: u32) -> Vec<Word> {
    degrees(rank, lo, hi).iter().flat_map(words_of_multidegree).collect()
}

/// Runs `f` for every multidegree in parallel and merges the outcomes in
/// input order. The first error (in input order) is returned after all
/// outcomes have been merged.
fn per_degree(
    out: &mut Outcome,
    ds: &[MultiDegree],
    f: impl Fn(&MultiDegree, &mut Outcome) -> Result<(), VerifyError> + Sync,
) -> Result<(), VerifyError> {
    let results: Vec<(Outcome, Result<(), VerifyError>)> = ds
        .par_iter()
        .map(|d| {
            let mut o = Outcome::default();
            let r = f(d, &mut o);
            (o, r)
        })
        .collect();
    let mut first = None;
    for (o, r) in results {
        out.merge(o);
        if let Err(e) = r {
            first.get_or_insert(e);
        }
    }
    first.map_or(Ok(()), Err)
}

/// Records dimensions and checks `lhs ⊆ rhs`.
fn check_leq(out: &mut Outcome, d: &MultiDegree, lhs: &GradedSpan, rhs: &GradedSpan) -> Result<bool, VerifyError> {
    out.dim(d, lhs.dim(), rhs.dim());
    if let Some(w) = lhs.witness_outside(rhs)? {
        out.fail(format!("at {d}: {}", w.to_text()));
        return Ok(false);
    }
    Ok(true)
}

/// Records dimensions and checks `lhs = rhs`.
fn check_eq(out: &mut Outcome, d: &MultiDegree, lhs: &GradedSpan, rhs: &GradedSpan) -> Result<bool, VerifyError> {
    out.dim(d, lhs.dim(), rhs.dim());
    if let Some(w) = lhs.witness_outside(rhs)? {
        out.fail(format!("at {d}, in the left side only: {}", w.to_text()));
        return Ok(false);
    }
    if let Some(w) = rhs.witness_outside(lhs)? {
        out.fail(format!("at {d}, in the right side only: {}", w.to_text()));
        return Ok(false);
    }
    Ok(true)
}

fn random_poly(rng: &mut ChaCha8Rng, rank: usize, field: FieldSpec) -> NcPoly {
    let mut f = NcPoly::zero(rank, field);
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(0..=2);
        let letters: Vec<usize> = (0..len).map(|_| rng.gen_range(0..rank)).collect();
        let c = field.from_i64(rng.gen_range(-3..=3));
        f = f.add(&NcPoly::word(rank, field, &letters).scale(&c));
    }
    f
}

fn op(kind: OpKind, arg: &NcPoly) -> Operator {
    Operator { kind, arg: arg.clone() }
}

fn identities(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let field = p.field("char")?;
    let rank = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(p.int("seed") as u64);
    let mut report = |name: &str, residue: NcPoly, inputs: &[&NcPoly]| {
        if !residue.is_zero() {
            let args: Vec<String> = inputs.iter().map(|f| f.to_text()).collect();
            out.fail(format!("{name} with arguments [{}] leaves {}", args.join("; "), residue.to_text()));
        }
    };
    let samples = p.int("samples") as usize;
    let mut tuples: Vec<Vec<NcPoly>> = vec![(0..rank).map(|i| letter(rank, field, i)).collect()];
    for _ in 0..samples {
        tuples.push((0..rank).map(|_| random_poly(&mut rng, rank, field)).collect());
    }
    for t in &tuples {
        let (a, b, c) = (&t[0], &t[1], &t[2]);
        let (u, v, s) = (c, a, b);
        report("[ab,c] = [a,bc] + [b,ca]", a.mul(b).commutator(c).sub(&a.commutator(&b.mul(c))).sub(&b.commutator(&c.mul(a))), &[a, b, c]);
        report("[ab,c] = a[b,c] + [a,c]b", a.mul(b).commutator(c).sub(&a.mul(&b.commutator(c))).sub(&a.commutator(c).mul(b)), &[a, b, c]);
        let lhs = a.mul(b).commutator(u).commutator(v);
        let rhs = a
            .commutator(u)
            .commutator(v)
            .mul(b)
            .add(&a.mul(&b.commutator(u).commutator(v)))
            .add(&a.commutator(v).mul(&b.commutator(u)))
            .add(&a.commutator(u).mul(&b.commutator(v)));
        report("[ab,u,v] expansion", lhs.sub(&rhs), &[a, b, u, v]);
        let ab = a.mul(b);
        let r_ab = s.apply_operators(&[op(OpKind::R, &ab)])?;
        let r_a_r_b = s.apply_operators(&[op(OpKind::R, a), op(OpKind::R, b)])?;
        report("R_ab = R_a R_b", r_ab.sub(&r_a_r_b), &[s, a, b]);
        let d_ab = s.apply_operators(&[op(OpKind::D, &ab)])?;
        let split = s
            .apply_operators(&[op(OpKind::R, a), op(OpKind::D, b)])?
            .add(&s.apply_operators(&[op(OpKind::L, b), op(OpKind::D, a)])?);
        report("D_ab = R_a D_b + L_b D_a", d_ab.sub(&split), &[s, a, b]);
        let l_a = s.apply_operators(&[op(OpKind::L, a)])?;
        let r_minus_d = s.apply_operators(&[op(OpKind::R, a)])?.sub(&s.apply_operators(&[op(OpKind::D, a)])?);
        report("L_a = R_a - D_a", l_a.sub(&r_minus_d), &[s, a]);
    }
    let (x, y) = (letter(2, field, 0), letter(2, field, 1));
    for n in 2..=p.uint("max_n")? {
        let lhs = x.pow(n).commutator(&y);
        let mut yi = x.commutator(&y);
        let mut rhs = NcPoly::zero(2, field);
        for i in 1..=n {
            rhs = rhs.add(&x.pow(n - i).mul(&yi).scale(&binomial(n as u64, i as u64, field)?));
            yi = yi.commutator(&x);
        }
        report(&format!("commutator binomial n={n}"), lhs.sub(&rhs), &[&x, &y]);
    }
    out.note(format!("{} argument tuples, commutator binomial up to n={}", tuples.len(), p.int("max_n")));
    Ok(())
}

fn rank4_counterexample(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let field = p.field("char")?;
    let e = engine(4, field);
    let d = MultiDegree(vec![1, 1, 1, 1]);
    let t3 = e.commutator_tideal(3, &d)?;
    let l = |i| letter(4, field, i);
    let f = l(0).commutator(&l(1)).mul(&l(2).commutator(&l(3)));
    out.dim(&d, 1, t3.dim());
    if t3.contains(&f)? {
        out.fail(format!("{} lies in T^(3)", f.to_text()));
    }
    Ok(())
}

/// Sum over all splits `d = d1 + d2` of the products `T^(m)_{d1} T^(n)_{d2}`,
/// compared with `T^(target)_d`.
fn product_inclusion(
    rank: usize,
    m: usize,
    n: usize,
    target: usize,
    field: FieldSpec,
    max_deg: u32,
    out: &mut Outcome,
) -> Result<(), VerifyError> {
    if m < 2 || n < 2 {
        return Err(invalid("m", "commutator degrees must be at least 2"));
    }
    let e = engine(rank, field);
    let ds = degrees(rank, (m + n) as u32, max_deg);
    per_degree(out, &ds, |d, o| {
        let mut lhs = e.zero_span(d);
        for d1 in d.below() {
            let d2 = d.checked_sub(&d1).expect("below");
            if (d1.total() as usize) < m || (d2.total() as usize) < n {
                continue;
            }
            let prod = crate::tgrade::product_span(&*e.commutator_tideal(m, &d1)?, &*e.commutator_tideal(n, &d2)?)?;
            lhs = lhs.sum(&prod)?;
        }
        let rhs = e.commutator_tideal(target, d)?;
        check_leq(o, d, &lhs, &rhs)?;
        Ok(())
    })
}

fn lemma1_3(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, rank, field, max_deg) = (p.usize("n")?, p.usize("rank")?, p.field("char")?, p.uint("max_deg")?);
    if n < 2 {
        return Err(invalid("n", "must be at least 2"));
    }
    let e = engine(rank, field);
    let ds = degrees(rank, n as u32 + 2, max_deg);
    per_degree(out, &ds, |d, o| {
        let monos = e.monomials(d);
        let mut b = EchelonBuilder::new(field, monos.len());
        let rhs = e.commutator_tideal(n + 2, d)?;
        for d1 in d.below() {
            if (d1.total() as usize) < n {
                continue;
            }
            let rest = d.checked_sub(&d1).expect("below");
            let rows = e.commutator_tideal(n, &d1)?.rows();
            if rows.is_empty() {
                continue;
            }
            for d2 in rest.below() {
                let d3 = rest.checked_sub(&d2).expect("below");
                if d2.total() == 0 || d3.total() == 0 {
                    continue;
                }
                let (w2, w3) = (words_of_multidegree(&d2), words_of_multidegree(&d3));
                for a in &w2 {
                    let a = word_poly(rank, field, a);
                    for bw in &w3 {
                        let bp = word_poly(rank, field, bw);
                        let ab = a.commutator(&bp);
                        for t in &rows {
                            for g in [t.commutator(&a).commutator(&bp), t.commutator(&ab)] {
                                let row = monos.row_of(&g)?;
                                if b.insert(&row) && !rhs.contains(&g)? {
                                    o.fail(format!("at {d}: {}", g.to_text()));
                                }
                            }
                        }
                    }
                }
            }
        }
        o.dim(d, b.rank(), rhs.dim());
        Ok(())
    })
}

fn eq1_3(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let field = p.field("char")?;
    for (rank, t) in [(3usize, 0usize), (3, 1), (3, 2), (4, 3)] {
        let e = engine(rank, field);
        let f = NcPoly::right_normed_vars(rank, field, &[0, 1, 2, t]).mul(&NcPoly::right_normed_vars(rank, field, &[0, 1]));
        let d = f.multidegree().expect("homogeneous");
        let t5 = e.commutator_tideal(5, &d)?;
        out.dim(&d, 1, t5.dim());
        if !t5.contains(&f)? {
            out.fail(f.to_text());
        }
    }
    Ok(())
}

fn corollary1(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, rank, field, max_deg) = (p.usize("n")?, p.usize("rank")?, p.field("char")?, p.uint("max_deg")?);
    if n < 3 {
        return Err(invalid("n", "must be at least 3"));
    }
    let e = engine(rank, field);
    let ds = degrees(rank, n as u32 - 1, max_deg);
    per_degree(out, &ds, |d, o| {
        let rows = e.commutator_tideal(n - 1, d)?.rows();
        let mut central = 0;
        for f in &rows {
            let mut ok = true;
            for j in 0..rank {
                let g = f.commutator(&letter(rank, field, j));
                if !e.commutator_tideal(n, &d.add(&MultiDegree::unit(rank, j)))?.contains(&g)? {
                    o.fail(format!("[{}, x{}] is not in T^({n})", f.to_text(), j + 1));
                    ok = false;
                }
            }
            central += ok as usize;
        }
        o.dim(d, rows.len(), central);
        Ok(())
    })
}

fn theorem2(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, rank, field, max_deg) = (p.usize("n")?, p.usize("rank")?, p.field("char")?, p.uint("max_deg")?);
    let pbw = PbwEngine::new(rank, max_deg as usize, field)?;
    let e = engine(rank, field);
    let ds = degrees(rank, 1, max_deg);
    per_degree(out, &ds, |d, o| {
        let heavy: Vec<NcPoly> =
            pbw.correct_words(d).iter().filter(|c| c.weight >= n).map(|c| c.expand(pbw.basis())).collect();
        let span = e.span_of(d, heavy.iter())?;
        let t = e.commutator_tideal(n, d)?;
        if span.dim() != heavy.len() {
            o.fail(format!("at {d}: correct words of weight >= {n} are dependent"));
        }
        check_eq(o, d, &t, &span)?;
        Ok(())
    })
}

fn corollary2(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, field) = (p.uint("n")?, p.field("char")?);
    if n < 3 {
        return Err(invalid("n", "must be at least 3"));
    }
    let e = engine(2, field);
    let c = letter(2, field, 0).commutator(&letter(2, field, 1));
    let d1 = MultiDegree(vec![n - 1, n - 1]);
    let t1 = e.commutator_tideal(n as usize, &d1)?;
    out.dim(&d1, 1, t1.dim());
    if !t1.contains(&c.pow(n - 1))? {
        out.fail(c.pow(n - 1).to_text());
    }
    let d2 = MultiDegree(vec![n - 2, n - 2]);
    let t2 = e.commutator_tideal(n as usize, &d2)?;
    out.dim(&d2, 1, t2.dim());
    if t2.contains(&c.pow(n - 2))? {
        out.fail(format!("{} lies in T^({n})", c.pow(n - 2).to_text()));
    }
    Ok(())
}

fn lemma2_1(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (m, rank, field, max_deg) = (p.usize("m")?, p.usize("rank")?, p.field("char")?, p.uint("max_deg")?);
    if m < 2 {
        return Err(invalid("m", "must be at least 2"));
    }
    let e = engine(rank, field);
    let ds = degrees(rank, m as u32, max_deg);
    per_degree(out, &ds, |d, o| {
        // all x M_1 ... M_k with letters, at least m-1 derivations, landing in d
        let mut forms: Vec<NcPoly> = Vec::new();
        fn rec(acc: NcPoly, left: &MultiDegree, ds_left: usize, rank: usize, field: FieldSpec, forms: &mut Vec<NcPoly>) {
            if left.total() == 0 {
                if ds_left == 0 && !acc.is_zero() {
                    forms.push(acc);
                }
                return;
            }
            if ds_left > left.total() as usize {
                return;
            }
            for j in 0..rank {
                let Some(rest) = left.checked_sub(&MultiDegree::unit(rank, j)) else { continue };
                let y = letter(rank, field, j);
                rec(acc.mul(&y), &rest, ds_left, rank, field, forms);
                rec(acc.commutator(&y), &rest, ds_left.saturating_sub(1), rank, field, forms);
            }
        }
        for i in 0..rank {
            if let Some(rest) = d.checked_sub(&MultiDegree::unit(rank, i)) {
                rec(letter(rank, field, i), &rest, m - 1, rank, field, &mut forms);
            }
        }
        let span = e.span_of(d, forms.iter())?;
        let t = e.commutator_tideal(m, d)?;
        check_leq(o, d, &t, &span)?;
        Ok(())
    })
}

fn frobenius(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, pp, q) = (p.uint("n")?, p.uint("p")? as u64, p.uint("q")?);
    if power_of(q as u64, pp).is_none_or(|s| s == 0) {
        return Err(invalid("q", format!("{q} is not a positive power of {pp}")));
    }
    if q + 1 < n {
        return Err(invalid("q", format!("q = {q} must be at least n - 1 = {}", n - 1)));
    }
    let field = FieldSpec::new(pp)?;
    let e = engine(2, field);
    let (x, y) = (letter(2, field, 0), letter(2, field, 1));
    let rels = [
        ("(x+y)^q - x^q - y^q", x.add(&y).pow(q).sub(&x.pow(q)).sub(&y.pow(q))),
        ("(xy)^q - x^q y^q", x.mul(&y).pow(q).sub(&x.pow(q).mul(&y.pow(q)))),
        ("[x, y^q]", x.commutator(&y.pow(q))),
    ];
    for (name, f) in rels {
        for (d, part) in f.multihomo_split() {
            let t = e.commutator_tideal(n as usize, &d)?;
            out.dim(&d, 1, t.dim());
            if !t.contains(&part)? {
                out.note(format!("{name} fails at {d}"));
                out.fail(format!("{name}: component {} is not in T^({n})", part.to_text()));
            }
        }
    }
    Ok(())
}

fn eq3_1(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (pp, q, mmax) = (p.uint("p")? as u64, p.uint("q")?, p.uint("mult_max")?);
    if power_of(q as u64, pp).is_none_or(|s| s == 0) {
        return Err(invalid("q", format!("{q} is not a positive power of {pp}")));
    }
    let field = FieldSpec::new(pp)?;
    let (x, y) = (letter(2, field, 0), letter(2, field, 1));
    for mm in 0..=mmax {
        for nn in 1..q {
            let lhs = x.pow(mm * q).mul(&x.pow(nn).commutator(&y));
            let mut rhs = NcPoly::zero(2, field);
            let mut yi = x.commutator(&y);
            for i in 1..=nn {
                rhs = rhs.add(&x.pow(mm * q + nn - i).mul(&yi).scale(&binomial(nn as u64, i as u64, field)?));
                yi = yi.commutator(&x);
            }
            if lhs != rhs {
                out.fail(format!("M={mm}, N={nn}: {}", lhs.sub(&rhs).to_text()));
            }
        }
    }
    // the middle coefficients C(N, i), 0 < i < N, all vanish mod p exactly when N > 1 is a power of p
    for nn in 2..=(q as u64).pow(2) {
        let vanish = (1..nn).all(|i| binomial(nn, i, field).map(|c| c.is_zero()).unwrap_or(false));
        if vanish != power_of(nn, pp).is_some() {
            out.fail(format!("N={nn}: middle binomial coefficients vanish = {vanish}"));
        }
    }
    Ok(())
}

fn theorem3(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, rank, field, max_deg) = (p.usize("n")?, p.usize("rank")?, p.field("char")?, p.uint("max_deg")?);
    if !field.is_rational() {
        return Err(invalid("char", "the statement is about characteristic 0"));
    }
    if n < 3 {
        return Err(invalid("n", "must be at least 3"));
    }
    let e = engine(rank, field);
    out.note("constants (total degree 0) are central but not in T^(n-1); compared from total degree 1".into());
    let ds = degrees(rank, 1, max_deg);
    per_degree(out, &ds, |d, o| {
        let center = e.center_component(n, d)?;
        let rhs = e.commutator_tideal(n - 1, d)?.sum(&*e.commutator_tideal(n, d)?)?;
        check_eq(o, d, &center, &rhs)?;
        Ok(())
    })
}

fn theorem4(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, rank, pp, q, max_deg) = (p.usize("n")?, p.usize("rank")?, p.uint("p")? as u64, p.uint("q")?, p.uint("max_deg")?);
    if power_of(q as u64, pp).is_none_or(|s| s == 0) {
        return Err(invalid("q", format!("{q} is not a positive power of {pp}")));
    }
    if (q as usize) + 1 < n {
        return Err(invalid("q", "must be at least n - 1"));
    }
    if n < 3 {
        return Err(invalid("n", "must be at least 3"));
    }
    let field = FieldSpec::new(pp)?;
    let e = engine(rank, field);
    let ds = degrees(rank, 0, max_deg);
    per_degree(out, &ds, |d, o| {
        let center = e.center_component(n, d)?;
        let rhs = e
            .commutator_tideal(n - 1, d)?
            .sum(&*e.power_tspace(q, d)?)?
            .sum(&*e.commutator_tideal(n, d)?)?;
        check_eq(o, d, &center, &rhs)?;
        Ok(())
    })
}

fn corollary3(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, field, max_deg) = (p.usize("n")?, p.field("char")?, p.uint("max_deg")?);
    if n < 3 {
        return Err(invalid("n", "must be at least 3"));
    }
    let e2 = engine(2, field);
    let e3 = engine(3, field);
    let ds = degrees(2, 1, max_deg);
    per_degree(out, &ds, |d, o| {
        let rows = e2.center_component(n, d)?.rows();
        let mut ok = 0;
        let d3 = MultiDegree(vec![d.0[0], d.0[1], 1]);
        let t = e3.commutator_tideal(n, &d3)?;
        for f in &rows {
            let g = f.widen(3).commutator(&letter(3, field, 2));
            if t.contains(&g)? {
                ok += 1;
            } else {
                o.fail(format!("[{}, z] is not in T^({n})", f.widen(3).to_text()));
            }
        }
        o.dim(d, rows.len(), ok);
        Ok(())
    })?;
    // [x,y]z is central modulo T^(3) in rank 3 but not once a fourth variable exists
    let e3 = engine(3, field);
    let f3 = NcPoly::right_normed_vars(3, field, &[0, 1]).mul(&letter(3, field, 2));
    let d = MultiDegree(vec![1, 1, 1]);
    let center = e3.center_component(3, &d)?;
    out.dim(&d, 1, center.dim());
    if !center.contains(&f3)? {
        out.fail(format!("{} is not central modulo T^(3) in rank 3", f3.to_text()));
    }
    let e4 = engine(4, field);
    let f4 = f3.widen(4);
    let g = f4.commutator(&letter(4, field, 3));
    let d4 = MultiDegree(vec![1, 1, 1, 1]);
    let t = e4.commutator_tideal(3, &d4)?;
    out.dim(&d4, 1, t.dim());
    if t.contains(&g)? {
        out.fail(format!("{} lies in T^(3)", g.to_text()));
    }
    Ok(())
}

fn sec4_1(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (pp, s, max_deg, span_deg) = (p.uint("p")? as u64, p.uint("s")?, p.uint("max_deg")?, p.uint("span_deg")?);
    if s == 0 {
        return Err(invalid("s", "must be at least 1"));
    }
    let q = pp.pow(s);
    let mut checked = 0;
    for a in 0..=max_deg {
        for b in 0..=(max_deg - a) {
            let t = (a, b);
            let member = comm_tspace_contains(t, q as u32, pp);
            if member != divisible_by_power(t, q) {
                out.fail(format!("x^{a}*y^{b}: membership {member} disagrees with divisibility"));
            }
            if a + b <= span_deg && member != comm_tspace_contains_by_substitution(t, q as u32, pp) {
                out.fail(format!("x^{a}*y^{b}: membership {member} disagrees with the spanning set"));
            }
            checked += 1;
        }
    }
    out.note(format!("{checked} monomials, q = {q}"));
    Ok(())
}

fn lemma4_1(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (pp, qmax) = (p.uint("p")?, p.uint("q_max")?);
    let field = FieldSpec::new(pp as u64)?;
    let comm = special_poly(1, 1, field).element;
    for q1 in 1..=qmax {
        if q1 % pp == 0 {
            continue;
        }
        for q2 in 1..=qmax {
            let target = special_poly(q1, q2, field).element;
            let res = tconsequence(&target, std::slice::from_ref(&comm), MAX_CLASSES)?;
            let verified = match &res.witness {
                Some(w) => verify_witness(&comm, w)?.1,
                None => false,
            };
            out.dim(&MultiDegree(vec![q1, q2]), res.holds as usize, verified as usize);
            if !(res.holds && verified) {
                out.fail(format!("{} (no verified witness)", target.to_text()));
            }
        }
    }
    Ok(())
}

fn lemma4_2(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let pp = p.uint("p")?;
    let field = FieldSpec::new(pp as u64)?;
    let comm = special_poly(1, 1, field).element;
    let target = special_poly(pp, pp, field).element;
    let res = tconsequence(&target, std::slice::from_ref(&comm), MAX_CLASSES)?;
    out.dim(&MultiDegree(vec![pp, pp]), res.holds as usize, 0);
    out.note(format!("{} coefficient classes, all vanishing", res.classes_checked));
    if res.holds {
        let w = res.witness.expect("witness");
        out.fail(format!("{} is reached by {}", target.to_text(), w.pattern));
    }
    Ok(())
}

fn theorem5(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (pp, s, qmax, emax) = (p.uint("p")? as u64, p.uint("s")?, p.uint("q_max")?, p.uint("exp_max")?);
    let q = pp.pow(s) as u32;
    let r = q * pp as u32;
    let cert = coefficient_certificate(q, q, (r, r), pp);
    out.dim(&MultiDegree(vec![r, r]), cert.classes as usize, cert.violations.len());
    out.note(format!("{} coefficient classes from f({q},{q}) into ({r},{r}), nonunit monomials", cert.classes));
    if let Some((pat, l)) = cert.violations.first() {
        out.fail(format!("{pat}: L = {l}"));
    }
    // the closed formula against the term-by-term expansion
    let mut compared = 0u64;
    let mut compare = |q1: u32, q2: u32, e: u32, out: &mut Outcome| {
        let rules = PatternRules { allow_unit: true, distinct: false, max_exponent: Some(e) };
        let bound = (q1.max(q2) * e, q1.max(q2) * e);
        let mut xs: Vec<Vec<(u32, (u32, u32))>> = Vec::new();
        let _ = for_each_side(q1, bound, rules, &mut |side, _| {
            xs.push(side.to_vec());
            ControlFlow::Continue(())
        });
        let mut ys: Vec<Vec<(u32, (u32, u32))>> = Vec::new();
        let _ = for_each_side(q2, bound, rules, &mut |side, _| {
            ys.push(side.to_vec());
            ControlFlow::Continue(())
        });
        for x in &xs {
            for y in &ys {
                let pat = SubstitutionPattern { parts_x: x.clone(), parts_y: y.clone() };
                let l = consequence_coefficient(&pat, q1, q2).expect("consistent pattern");
                let direct = instance_coefficient(&pat, q1, q2).expect("consistent pattern");
                compared += 1;
                if l != Rational::from_big(BigRational::from_integer(direct.clone())) {
                    out.fail(format!("{pat}: closed form {l}, expansion {direct}"));
                }
            }
        }
    };
    for q1 in 1..=qmax {
        for q2 in 1..=qmax {
            compare(q1, q2, emax, out);
        }
    }
    for q1 in 1..=qmax.min(3) {
        for q2 in 1..=qmax.min(3) {
            compare(q1, q2, 3, out);
        }
    }
    // per-side identity behind the bilinear formula, exponents up to 3
    let mut sides = 0u64;
    for qq in 1..=qmax {
        let rules = PatternRules { allow_unit: true, distinct: false, max_exponent: Some(3) };
        let _ = for_each_side(qq, (3 * qq, 3 * qq), rules, &mut |side, _| {
            sides += 1;
            let fact = |k: u32| (1..=k).fold(BigInt::from(1), |a, i| a * BigInt::from(i));
            let den = side.iter().fold(BigInt::from(1), |a, s| a * fact(s.0));
            for i in 0..side.len() {
                let mut ks: Vec<u32> = side.iter().map(|s| s.0).collect();
                ks[i] -= 1;
                let multi = ks.iter().fold(BigInt::from(1), |a, &k| a * fact(k));
                let lhs = fact(qq - 1) / multi;
                let rhs = BigInt::from(side[i].0) * fact(qq - 1);
                if lhs.clone() * &den != rhs {
                    out.fail(format!("side {side:?}: multinomial identity fails at part {i}"));
                }
            }
            ControlFlow::Continue(())
        });
    }
    out.note(format!("{compared} patterns compared with the expansion; {sides} single-side patterns checked"));
    Ok(())
}

fn corollary4(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (pp, smax) = (p.uint("p")?, p.uint("s_max")?);
    let field = FieldSpec::new(pp as u64)?;
    for s in 1..=smax {
        let mut gens = Vec::new();
        for i in 0..s {
            for j in 0..s {
                gens.push(special_poly(pp.pow(i), pp.pow(j), field).element);
            }
        }
        let q = pp.pow(s);
        let target = special_poly(q, q, field).element;
        let res = tconsequence(&target, &gens, MAX_CLASSES)?;
        out.dim(&MultiDegree(vec![q, q]), res.holds as usize, gens.len());
        out.note(format!("s={s}: {} coefficient classes, all vanishing", res.classes_checked));
        if res.holds {
            let w = res.witness.expect("witness");
            out.fail(format!("{} follows from generator {} via {}", target.to_text(), w.generator, w.pattern));
        }
    }
    Ok(())
}

fn lemma5_1(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, rank, field, mono_deg) = (p.usize("n")?, p.usize("rank")?, p.field("char")?, p.uint("mono_deg")?);
    if n < 2 || rank < n {
        return Err(invalid("rank", "need n >= 2 and rank >= n"));
    }
    let e = engine(rank, field);
    let c = |a: &NcPoly| (1..n).fold(a.clone(), |acc, j| acc.commutator(&letter(rank, field, j)));
    let words = words_up_to(rank, 1, mono_deg);
    let mut by_degree: BTreeMap<MultiDegree, Vec<NcPoly>> = BTreeMap::new();
    for a in &words {
        let ap = word_poly(rank, field, a);
        let ca = c(&ap);
        for b in &words {
            let bp = word_poly(rank, field, b);
            let g = c(&ap.mul(&bp)).sub(&ap.mul(&c(&bp))).sub(&ca.mul(&bp));
            if let Some(d) = ap.mul(&bp).multidegree() {
                let d = d.add(&MultiDegree((0..rank).map(|j| (1..n).contains(&j) as u32).collect()));
                by_degree.entry(d).or_default().push(g);
            }
        }
    }
    let ds: Vec<MultiDegree> = by_degree.keys().cloned().collect();
    per_degree(out, &ds, |d, o| {
        let lhs = e.span_of(d, by_degree[d].iter())?;
        let rhs = e.proper_ideal_component(n + 1, d)?;
        check_leq(o, d, &lhs, &rhs)?;
        Ok(())
    })
}

fn theorem6_arith(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (pp, smax) = (p.uint("p")? as u64, p.uint("s_max")? as u64);
    for s in 0..=smax {
        let (i, j) = theorem6_pair(s, pp);
        let ok = i >= 1 && j >= 1 && i + j - 2 == s && i % pp != 0 && j % pp != 0;
        let exists = (1..=s + 1).any(|i| {
            let j = s + 2 - i;
            i % pp != 0 && j % pp != 0
        });
        if !ok || !exists {
            out.fail(format!("s={s}: pair ({i},{j}), a solution exists: {exists}"));
        }
    }
    Ok(())
}

fn remark5(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (alpha, beta, max_deg) = (p.int("alpha"), p.int("beta"), p.uint("max_deg")?);
    if alpha == beta {
        return Err(invalid("beta", "alpha and beta must differ"));
    }
    let field = FieldSpec::Q;
    let e = engine(2, field);
    let sq = NcPoly::right_normed_vars(2, field, &[0, 1]).pow(2);
    let hall = NcPoly::right_normed_vars(2, field, &[0, 1, 0, 1]);
    let d = MultiDegree(vec![2, 2]);
    let t5 = e.commutator_tideal(5, &d)?;
    let both = t5.sum(&e.span_of(&d, [&sq, &hall])?)?;
    out.dim(&d, both.dim() - t5.dim(), 2);
    if both.dim() - t5.dim() != 2 {
        out.fail(format!("{} and {} are dependent modulo T^(5)", sq.to_text(), hall.to_text()));
    }
    let f = |a: i64| sq.add(&hall.scale(&field.from_i64(a)));
    let (fa, fb) = (f(alpha), f(beta));
    // which of the two basic elements each T-ideal reaches in bidegree (2,2)
    for (a, fa) in [(alpha, &fa), (beta, &fb)] {
        let ia = e.tideal_component(std::slice::from_ref(fa), &d)?.sum(&t5)?;
        out.note(format!(
            "alpha={a}: I contains [x,y]^2: {}, [x,y,x,y]: {}",
            ia.contains(&sq)?,
            ia.contains(&hall)?
        ));
    }
    let ds = degrees(2, 1, max_deg);
    let mut separated = false;
    for d in &ds {
        let t5 = e.commutator_tideal(5, d)?;
        let ia = e.tideal_component(std::slice::from_ref(&fa), d)?.sum(&t5)?;
        let ib = e.tideal_component(std::slice::from_ref(&fb), d)?.sum(&t5)?;
        out.dim(d, ia.dim(), ib.dim());
        if ia != ib {
            separated = true;
            out.note(format!("the T-ideals differ at {d}"));
            break;
        }
    }
    if !separated {
        out.fail(format!("T-ideals of {} and {} agree up to total degree {max_deg}", fa.to_text(), fb.to_text()));
    }
    Ok(())
}

fn kernel(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, rank, field, max_deg, mono_deg) =
        (p.usize("n")?, p.usize("rank")?, p.field("char")?, p.uint("max_deg")?, p.uint("mono_deg")?);
    let e = engine(rank, field);
    let gs = words_up_to(rank, 0, mono_deg);
    let hs = words_up_to(rank, 1, mono_deg);
    let ds = degrees(rank, 1, max_deg);
    per_degree(out, &ds, |d, o| {
        let rows = e.center_component(n, d)?.rows();
        let mut checked = 0;
        for f in &rows {
            for g in &gs {
                let fg = f.mul(&word_poly(rank, field, g));
                for h in &hs {
                    let hp = word_poly(rank, field, h);
                    let x = fg.commutator(&hp);
                    let dd = d.add(&g.multidegree(rank)).add(&h.multidegree(rank));
                    checked += 1;
                    if !e.commutator_tideal(n, &dd)?.contains(&x)? {
                        o.fail(format!("[({})*{}, {}] is not in T^({n})", f.to_text(), fmt_word(g, rank, field), fmt_word(h, rank, field)));
                    }
                }
            }
        }
        o.dim(d, rows.len(), checked);
        Ok(())
    })
}

fn fmt_word(w: &Word, rank: usize, field: FieldSpec) -> String {
    word_poly(rank, field, w).to_text()
}

fn f23_crosscheck(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (field, max_deg) = (p.field("char")?, p.uint("max_deg")?);
    let e = engine(2, field);
    let ds = degrees(2, 0, max_deg);
    per_degree(out, &ds, |d, o| {
        let words = words_of_multidegree(d);
        // the model coordinates of a bidegree: the monomial and the commutator part
        let mut rows: Vec<SparseRow> = vec![Vec::new(), Vec::new()];
        for (col, w) in words.iter().enumerate() {
            let r = f23_reduce(&word_poly(2, field, w))?;
            for (k, part) in [r.u(), r.v()].into_iter().enumerate() {
                if let Some(c) = part.values().next() {
                    rows[k].push((col, c.clone()));
                }
            }
        }
        let kernel = kernel_of(field, words.len(), &rows);
        let polys: Vec<NcPoly> = kernel
            .iter()
            .map(|row| {
                NcPoly::from_terms(2, field, row.iter().map(|(c, s)| (words[*c].clone(), s.clone()))).expect("rank 2 words")
            })
            .collect();
        let lhs = e.span_of(d, polys.iter())?;
        let rhs = e.commutator_tideal(3, d)?;
        check_eq(o, d, &lhs, &rhs)?;
        Ok(())
    })?;
    for rank in [2usize, 3] {
        let pbw = PbwEngine::new(rank, max_deg as usize, field)?;
        for w in words_up_to(rank, 0, max_deg) {
            let f = word_poly(rank, field, &w);
            let back = pbw.decompose(&f)?.expand(pbw.basis());
            if back != f {
                out.fail(format!("PBW round trip of {} gives {}", f.to_text(), back.to_text()));
            }
        }
    }
    Ok(())
}

fn tie_break(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, rank, field, max_deg) = (p.usize("n")?, p.usize("rank")?, p.field("char")?, p.uint("max_deg")?);
    let a = PbwEngine::with_tie_break(rank, max_deg as usize, field, TieBreak::Lex)?;
    let b = PbwEngine::with_tie_break(rank, max_deg as usize, field, TieBreak::ReverseLex)?;
    let e = engine(rank, field);
    let ds = degrees(rank, 1, max_deg);
    per_degree(out, &ds, |d, o| {
        let heavy = |pbw: &PbwEngine| -> Vec<NcPoly> {
            pbw.correct_words(d).iter().filter(|c| c.weight >= n).map(|c| c.expand(pbw.basis())).collect()
        };
        let sa = e.span_of(d, heavy(&a).iter())?;
        let sb = e.span_of(d, heavy(&b).iter())?;
        check_eq(o, d, &sa, &sb)?;
        Ok(())
    })
}

fn theorem6_factor(p: &Params, out: &mut Outcome) -> Result<(), VerifyError> {
    let (n, pp, max_deg) = (p.usize("n")?, p.uint("p")? as u64, p.uint("max_deg")?);
    if n < 4 {
        return Err(invalid("n", "must be at least 4"));
    }
    if (pp as usize) < n {
        return Err(invalid("p", "the characteristic must be at least n"));
    }
    let field = FieldSpec::new(pp)?;
    let e = engine(2, field);
    let top = 2 * (n as u32 - 2);
    let pbw = PbwEngine::new(2, top.max(max_deg) as usize, field)?;
    let basis = pbw.basis();
    // proper correct words of weight exactly n-1, higher degree first
    let mut cands: Vec<(u32, MultiDegree, NcPoly)> = Vec::new();
    for d in degrees(2, 2, top) {
        for cw in pbw.correct_words(&d) {
            let proper = cw.factors.iter().all(|&i| basis.elements()[i].degree >= 2);
            if proper && cw.weight == n - 1 {
                cands.push((d.total(), d.clone(), cw.expand(basis)));
            }
        }
    }
    cands.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| b.1.cmp(&a.1)));
    let mut gens: Vec<NcPoly> = Vec::new();
    for (_, d, u) in cands {
        let known = e.tspace_component(&gens, &d)?.sum(&*e.commutator_tideal(n, &d)?)?;
        if known.contains(&u)? {
            continue;
        }
        let u = if u.degree_in(0) == 1 {
            // trade the lone x for a second x by linearizing y -> y + x
            let shifted = u.substitute(&[letter(2, field, 0), letter(2, field, 1).add(&letter(2, field, 0))])?;
            shifted.multihomo_component(&MultiDegree(vec![2, d.0[1] - 1]))
        } else {
            u
        };
        gens.push(u);
    }
    out.note(format!(
        "generators: {}",
        gens.iter().map(|g| g.to_text()).collect::<Vec<_>>().join(" ; ")
    ));
    out.note(format!("truncated: factor simplicity is only checked up to total degree {max_deg}"));
    let ds = degrees(2, 0, max_deg);
    // T_k for k = 0..=K as components, T_0 = T^(n)
    let level = |k: usize, d: &MultiDegree| -> Result<GradedSpan, VerifyError> {
        let t = e.commutator_tideal(n, d)?;
        if k == 0 {
            return Ok((*t).clone_span());
        }
        Ok(e.tideal_component(&gens[..k], d)?.sum(&t)?)
    };
    // the chain ends at T^(n-1)
    per_degree(out, &ds, |d, o| {
        let last = level(gens.len(), d)?;
        check_eq(o, d, &last, &*e.commutator_tideal(n - 1, d)?)?;
        Ok(())
    })?;
    for k in 0..gens.len() {
        let mut tests: Vec<(MultiDegree, NcPoly)> = Vec::new();
        for d in &ds {
            let lo = level(k, d)?;
            let hi = level(k + 1, d)?;
            let mut b = EchelonBuilder::new(field, lo.ambient_dim());
            for r in lo.basis().sparse_rows() {
                b.insert(&r);
            }
            let mut reps = Vec::new();
            for f in hi.rows() {
                if b.insert(&lo.monomials().row_of(&f)?) {
                    reps.push(f);
                }
            }
            if reps.len() > 1 {
                let sum = reps.iter().skip(1).fold(reps[0].clone(), |a, f| a.add(f));
                reps.push(sum);
            }
            tests.extend(reps.into_iter().map(|f| (d.clone(), f)));
        }
        let per_test: Vec<(Outcome, Result<(), VerifyError>)> = tests
            .par_iter()
            .map(|(d0, f)| {
                let mut o = Outcome::default();
                let r = (|| {
                    for d in &ds {
                        let lo = level(k, d)?;
                        let hi = level(k + 1, d)?;
                        if lo.dim() == hi.dim() {
                            continue;
                        }
                        let got = e.tspace_over(std::slice::from_ref(f), d, &lo, Some(&hi))?;
                        if got.dim() != hi.dim() {
                            o.fail(format!(
                                "factor {}: {} (degree {d0}) does not regenerate degree {d} ({} of {})",
                                k + 1,
                                f.to_text(),
                                got.dim() - lo.dim(),
                                hi.dim() - lo.dim()
                            ));
                        }
                    }
                    Ok(())
                })();
                (o, r)
            })
            .collect();
        let mut first = None;
        for (o, r) in per_test {
            out.merge(o);
            if let Err(err) = r {
                first.get_or_insert(err);
            }
        }
        if let Some(err) = first {
            return Err(err);
        }
        out.note(format!("factor {}: {} test elements", k + 1, tests.len()));
    }
    Ok(())
}

trait CloneSpan {
    fn clone_span(&self) -> GradedSpan;
}

impl CloneSpan for GradedSpan {
    fn clone_span(&self) -> GradedSpan {
        self.sum(self).expect("same component")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{run_check, CheckRequest, Status};

    fn status(req: CheckRequest) -> Status {
        run_check(&req).expect("valid request").status
    }

    #[test]
    fn rank4_product_inclusion_with_too_small_target_fails() {
        // T^(2) T^(2) is not inside T^(3) once four variables exist
        let mut out = Outcome::default();
        product_inclusion(4, 2, 2, 3, FieldSpec::Q, 4, &mut out).unwrap();
        assert!(out.failed);
        assert!(out.counterexample.is_some());
    }

    #[test]
    fn rank3_product_inclusion_holds_at_small_degree() {
        let mut out = Outcome::default();
        product_inclusion(3, 2, 2, 3, FieldSpec::Q, 5, &mut out).unwrap();
        assert!(!out.failed, "{:?}", out.counterexample);
        assert!(!out.dims.is_empty());
    }

    #[test]
    fn frobenius_past_the_bound_is_detected() {
        assert_eq!(status(CheckRequest::new("frobenius").unwrap().with("n", 5)), Status::Pass);
        assert_eq!(status(CheckRequest::new("frobenius").unwrap().with("n", 6)), Status::Fail);
    }

    #[test]
    fn frobenius_rejects_non_powers() {
        let err = run_check(&CheckRequest::new("frobenius").unwrap().with("q", 6)).unwrap_err();
        assert!(matches!(err, VerifyError::InvalidParam { .. }));
    }

    #[test]
    fn remark5_separates_zero_from_nonzero_alpha_only() {
        let r = |a, b| status(CheckRequest::new("remark5").unwrap().with("alpha", a).with("beta", b));
        assert_eq!(r(0, 1), Status::Pass);
        assert_eq!(r(0, -3), Status::Pass);
        assert_eq!(r(1, 2), Status::Fail);
    }

    #[test]
    fn remark5_rejects_equal_parameters() {
        let err = run_check(&CheckRequest::new("remark5").unwrap().with("alpha", 2).with("beta", 2)).unwrap_err();
        assert!(matches!(err, VerifyError::InvalidParam { .. }));
    }

    #[test]
    fn theorem3_refuses_positive_characteristic() {
        let err = run_check(&CheckRequest::new("theorem3").unwrap().with("char", 5)).unwrap_err();
        assert!(matches!(err, VerifyError::InvalidParam { .. }));
    }

    #[test]
    fn lemma5_1_needs_enough_variables() {
        let err = run_check(&CheckRequest::new("lemma5_1").unwrap().with("n", 3).with("rank", 2)).unwrap_err();
        assert!(matches!(err, VerifyError::InvalidParam { .. }));
    }

    #[test]
    fn lemma4_2_holds_for_p7() {
        assert_eq!(status(CheckRequest::new("lemma4_2").unwrap().with("p", 7)), Status::Pass);
    }

    #[test]
    fn cap_hit_is_reported_not_passed() {
        // [x,y]^7 has total degree 14, above the default degree cap
        let r = run_check(&CheckRequest::new("corollary2").unwrap().with("n", 8)).unwrap();
        assert_eq!(r.status, Status::CapExceeded);
        assert!(r.counterexample.is_none());
    }
}
