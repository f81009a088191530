//! Acceptance criteria 1–16: each runs the relevant checks at the pinned
//! parameters and prints one PASS/FAIL line. Runtime limits are pinned in
//! milliseconds of summed check `elapsed_ms`.

use std::process::ExitCode;
use std::time::Instant;

use lienil::freealg::{MultiDegree, NcPoly};
use lienil::scalars::FieldSpec;
use lienil::tgrade::TEngine;
use lienil::verify::{run_check, CheckRequest, CheckResult, Status};

type BlockingProof = fn() -> Result<String, String>;

struct Criterion {
    id: u32,
    title: &'static str,
    /// Upper bound on the summed check time in milliseconds, if pinned.
    limit_ms: Option<u64>,
    requests: Vec<CheckRequest>,
    /// Requests (by index) that cannot pass because the statement itself
    /// fails, with a machine-checked proof of that failure. Such a criterion
    /// still prints FAIL.
    blocked: Option<(Vec<usize>, BlockingProof)>,
}

fn req(name: &str, params: &[(&str, i64)]) -> CheckRequest {
    params.iter().fold(CheckRequest::new(name).expect("catalog entry"), |r, (k, v)| r.with(k, *v))
}

fn criteria() -> Vec<Criterion> {
    let mut out = Vec::new();
    let mut push = |id, title, limit_ms, requests| out.push(Criterion { id, title, limit_ms, requests, blocked: None });

    push(
        1,
        "exact identities over Q and F_5, commutator binomial for 2 <= n <= 8",
        Some(5_000),
        vec![req("identities", &[("char", 0), ("max_n", 8)]), req("identities", &[("char", 5), ("max_n", 8)])],
    );
    push(2, "[x,y][z,t] is outside T^(3) at (1,1,1,1)", Some(1_000), vec![req("rank4_counterexample", &[("char", 0)])]);
    let mut t1 = Vec::new();
    for (m, n) in [(2, 2), (2, 3), (3, 3), (2, 4)] {
        for c in [0, 5] {
            t1.push(req("theorem1", &[("m", m), ("n", n), ("char", c), ("max_deg", 8)]));
        }
    }
    push(3, "T^(m) T^(n) inside T^(m+n-1) in rank 3, total degree <= 8, over Q and F_5", None, t1);
    push(
        4,
        "rank-4 product inclusions, commutator-of-T inclusions for n in {2,3}, [x,y,z,t][x,y] in T^(5)",
        None,
        vec![
            req("latyshev", &[("m", 2), ("n", 2), ("rank", 4), ("max_deg", 6)]),
            req("lemma1_2", &[("m", 3), ("n", 2), ("rank", 4), ("max_deg", 6)]),
            req("lemma1_3", &[("n", 2), ("rank", 3), ("max_deg", 7)]),
            req("lemma1_3", &[("n", 3), ("rank", 3), ("max_deg", 7)]),
            req("eq1_3", &[]),
        ],
    );
    push(
        5,
        "T^(n) equals the span of correct words of weight >= n, n in {3,4,5}, rank 3, total degree <= 7",
        None,
        (3..=5).map(|n| req("theorem2", &[("n", n), ("rank", 3), ("max_deg", 7)])).collect(),
    );
    push(
        6,
        "[x,y]^(n-1) in T^(n) and [x,y]^(n-2) outside, n in {3,...,6}",
        Some(30_000),
        (3..=6).map(|n| req("corollary2", &[("n", n)])).collect(),
    );
    push(
        7,
        "Frobenius relations over F_5 with q = 5, n in {4,5,6}",
        None,
        (4..=6).map(|n| req("frobenius", &[("n", n), ("p", 5), ("q", 5)])).collect(),
    );
    let mut t3 = Vec::new();
    let mut t4 = Vec::new();
    for n in [4, 5] {
        for rank in [2, 3] {
            t3.push(req("theorem3", &[("n", n), ("rank", rank), ("char", 0), ("max_deg", 6)]));
            t4.push(req("theorem4", &[("n", n), ("rank", rank), ("p", 5), ("q", 5), ("max_deg", 7)]));
        }
    }
    push(8, "char-0 center equals T^(n-1) + T^(n), n in {4,5}, ranks 2 and 3, total degree <= 6", None, t3);
    push(9, "char-5 center equals T^(n-1) + Z_5 + T^(n), n in {4,5}, ranks 2 and 3, total degree <= 7", None, t4);
    push(
        10,
        "rank-2 center rows stay central with a third variable; [x,y]z central in rank 3 only",
        None,
        vec![req("corollary3", &[("n", 4), ("char", 0), ("max_deg", 6)]), req("corollary3", &[("n", 4), ("char", 5), ("max_deg", 6)])],
    );
    push(
        11,
        "commutative T-space of x^5: divisibility criterion to degree 15, spanning set to degree 10",
        None,
        vec![req("sec4_1", &[("p", 5), ("s", 1), ("max_deg", 15), ("span_deg", 10)])],
    );
    push(
        12,
        "f(q1,q2) consequences with witnesses, f(p,p) not, over F_5 and F_7; coefficient certificate (5,5) -> (25,25)",
        None,
        vec![
            req("lemma4_1", &[("p", 5), ("q_max", 12)]),
            req("lemma4_1", &[("p", 7), ("q_max", 12)]),
            req("lemma4_2", &[("p", 5)]),
            req("lemma4_2", &[("p", 7)]),
            req("theorem5", &[("p", 5), ("s", 1), ("q_max", 6)]),
        ],
    );
    push(
        13,
        "the iterated commutator is a derivation modulo I_(n+1), n in {2,3}, monomials of degree <= 3",
        None,
        vec![
            req("lemma5_1", &[("n", 2), ("rank", 3), ("mono_deg", 3)]),
            req("lemma5_1", &[("n", 3), ("rank", 3), ("mono_deg", 3)]),
        ],
    );
    push(
        14,
        "i + j - 2 = s with i, j prime to p for s <= 1000, p in {5,7,11}; factor simplicity at n = 4, p = 5, degree <= 8",
        None,
        vec![
            req("theorem6_arith", &[("p", 5), ("s_max", 1000)]),
            req("theorem6_arith", &[("p", 7), ("s_max", 1000)]),
            req("theorem6_arith", &[("p", 11), ("s_max", 1000)]),
            req("theorem6_factor", &[("n", 4), ("p", 5), ("max_deg", 8)]),
        ],
    );
    push(
        15,
        "[x,y]^2 and [x,y,x,y] independent modulo T^(5); T-ideals of f_alpha and f_beta separated",
        None,
        [(0, 1), (1, 2), (1, -1)].iter().map(|&(a, b)| req("remark5", &[("alpha", a), ("beta", b), ("max_deg", 6)])).collect(),
    );
    push(
        16,
        "model kernel equals T^(3) in rank 2 to degree 6; PBW round trip to degree 6",
        None,
        vec![req("f23_crosscheck", &[("char", 0), ("max_deg", 6)]), req("f23_crosscheck", &[("char", 5), ("max_deg", 6)])],
    );
    for c in &mut out {
        match c.id {
            7 => c.blocked = Some((vec![2], frobenius_bound_is_sharp)),
            15 => c.blocked = Some((vec![1, 2], nonzero_alphas_generate_the_same_t_ideal)),
            _ => {}
        }
    }
    out
}

/// Over F_5, the (1,4) component of (x+y)^5 - x^5 - y^5 is a nonzero
/// multiple of [x,y,y,y,y], and T^(6) has no nonzero element of degree 5,
/// so the additive relation fails for q = 5, n = 6.
fn frobenius_bound_is_sharp() -> Result<String, String> {
    let f = FieldSpec::prime(5).map_err(|e| e.to_string())?;
    let (x, y) = (NcPoly::var(2, f, 0), NcPoly::var(2, f, 1));
    let d = MultiDegree(vec![1, 4]);
    let comp = x.add(&y).pow(5).sub(&x.pow(5)).sub(&y.pow(5)).multihomo_component(&d);
    let comm = NcPoly::right_normed_vars(2, f, &[0, 1, 1, 1, 1]);
    let proportional = [1, -1].iter().any(|&c| comp.add(&comm.scale(&f.from_i64(c))).is_zero());
    let t6 = TEngine::new(2, f).commutator_tideal(6, &d).map_err(|e| e.to_string())?;
    if comp.is_zero() || !proportional || t6.dim() != 0 {
        return Err(format!("component {} is not the predicted obstruction", comp.to_text()));
    }
    Ok("(1,4) component of (x+y)^5 is +-[x,y,y,y,y] and T^(6) is zero in degree 5; the relation needs q >= n".into())
}

/// For alpha != 0 the T-ideal of [x,y]^2 + alpha[x,y,x,y] contains both
/// [x,y]^2 and [x,y,x,y]; every such generator therefore lies in every other
/// such T-ideal, and I_alpha = I_beta in all degrees.
fn nonzero_alphas_generate_the_same_t_ideal() -> Result<String, String> {
    let q = FieldSpec::Q;
    let e = TEngine::new(2, q);
    let d = MultiDegree(vec![2, 2]);
    let sq = NcPoly::right_normed_vars(2, q, &[0, 1]).pow(2);
    let hall = NcPoly::right_normed_vars(2, q, &[0, 1, 0, 1]);
    for a in [1, 2, -1] {
        let fa = sq.add(&hall.scale(&q.from_i64(a)));
        let ia = e.tideal_component(std::slice::from_ref(&fa), &d).map_err(|e| e.to_string())?;
        if !(ia.contains(&sq).map_err(|e| e.to_string())? && ia.contains(&hall).map_err(|e| e.to_string())?) {
            return Err(format!("I_{a} does not reach both [x,y]^2 and [x,y,x,y]"));
        }
    }
    Ok("I_1, I_2, I_-1 each contain [x,y]^2 and [x,y,x,y], hence coincide in every degree".into())
}

fn describe_failure(r: &CheckResult) -> String {
    match (&r.status, &r.counterexample) {
        (_, Some(c)) => format!("{} {}: {c}", r.check, r.status),
        (s, None) => format!("{} {s}: {}", r.check, r.notes.join("; ")),
    }
}

// The harness is disabled for this target so that the report lines appear
// uncaptured and in order.
fn main() -> ExitCode {
    let list_only = std::env::args().any(|a| a == "--list");
    if list_only {
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    let mut blocked_only = 0;
    let mut any_unexplained = false;
    for c in criteria() {
        let wall = Instant::now();
        let mut problems = Vec::new();
        let mut unexplained = false;
        let mut elapsed = 0u64;
        for (i, r) in c.requests.iter().enumerate() {
            let explained = c.blocked.as_ref().is_some_and(|(idx, _)| idx.contains(&i));
            let problem = match run_check(r) {
                Ok(res) => {
                    elapsed += res.elapsed_ms;
                    (res.status != Status::Pass).then(|| describe_failure(&res))
                }
                Err(e) => Some(format!("{}: {e}", r.name)),
            };
            match problem {
                Some(p) if explained => problems.push(format!("{p}  [blocked]")),
                Some(p) => {
                    unexplained = true;
                    problems.push(p);
                }
                None if explained => {
                    unexplained = true;
                    problems.push(format!("{} passed although its blocking proof predicts failure", r.name));
                }
                None => {}
            }
        }
        if let Some(limit) = c.limit_ms {
            if elapsed > limit {
                unexplained = true;
                problems.push(format!("took {elapsed} ms, limit {limit} ms"));
            }
        }
        if let Some((_, proof)) = &c.blocked {
            match proof() {
                Ok(why) => problems.push(format!("blocking proof verified: {why}")),
                Err(why) => {
                    unexplained = true;
                    problems.push(format!("blocking proof FAILED: {why}"));
                }
            }
        }
        let passed = !problems.iter().any(|p| !p.starts_with("blocking proof verified"));
        let status = if passed { "PASS" } else { "FAIL" };
        println!(
            "criterion {:>2}: {status}  [{} checks, {:.1} s]  {}",
            c.id,
            c.requests.len(),
            wall.elapsed().as_secs_f64(),
            c.title
        );
        for p in &problems {
            println!("    {p}");
        }
        failed += !passed as usize;
        blocked_only += (!passed && !unexplained) as usize;
        any_unexplained |= unexplained;
    }
    println!("acceptance: {} of 16 criteria passed, {failed} failed ({blocked_only} blocked by a verified counterexample to the statement itself)", 16 - failed);
    if any_unexplained {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
