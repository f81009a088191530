//! Named, parameterized verification checks and their reports.
//!
//! Every check in [`CATALOG`] confirms one statement about the algebras
//! `F^(n) = F / T^(n)` at bounded degree. `PASS` uniformly means "the
//! statement is confirmed", including the checks that verify a
//! non-membership.

mod checks;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f23model::F23Error;
use crate::freealg::{FreeAlgError, MultiDegree};
use crate::pbw::PbwError;
use crate::scalars::{FieldSpec, ScalarError};
use crate::tgrade::TgradeError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("unknown check '{0}'")]
    UnknownCheck(String),
    #[error("invalid parameter {name}: {reason}")]
    InvalidParam { name: String, reason: String },
    #[error(transparent)]
    Tgrade(#[from] TgradeError),
    #[error(transparent)]
    F23(#[from] F23Error),
    #[error(transparent)]
    Pbw(#[from] PbwError),
    #[error(transparent)]
    FreeAlg(#[from] FreeAlgError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "CAP_EXCEEDED")]
    CapExceeded,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::CapExceeded => "CAP_EXCEEDED",
        })
    }
}

/// Dimensions compared at one multidegree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRecord {
    pub multidegree: Vec<u32>,
    pub lhs_dim: usize,
    pub rhs_dim: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub params: BTreeMap<String, i64>,
    pub status: Status,
    pub dims: Vec<DimRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    pub elapsed_ms: u64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// One catalog entry: the check name, the statement it confirms and its
/// default ("desk scale") parameters.
#[derive(Debug, Clone, Copy)]
pub struct CheckSpec {
    pub name: &'static str,
    pub statement: &'static str,
    pub defaults: &'static [(&'static str, i64)],
}

pub const CATALOG: &[CheckSpec] = &[
    CheckSpec {
        name: "identities",
        statement: "[xy,z] = [x,yz] + [y,zx]; [xy,z] = x[y,z] + [x,z]y; [ab,u,v] expansion; R_ab = R_a R_b, D_ab = R_a D_b + L_b D_a, L_a = R_a - D_a; commutator binomial [x^n,y] = sum C(n,i) x^(n-i) y_i",
        defaults: &[("char", 0), ("max_n", 8), ("samples", 12), ("seed", 1)],
    },
    CheckSpec {
        name: "rank4_counterexample",
        statement: "[x,y][z,t] is not in T^(3)",
        defaults: &[("char", 0)],
    },
    CheckSpec {
        name: "theorem1",
        statement: "in a 3-generated algebra T^(m) T^(n) lies in T^(m+n-1)",
        defaults: &[("m", 2), ("n", 2), ("char", 0), ("max_deg", 7)],
    },
    CheckSpec {
        name: "latyshev",
        statement: "T^(m) T^(n) lies in T^(m+n-2)",
        defaults: &[("m", 2), ("n", 2), ("rank", 4), ("char", 0), ("max_deg", 6)],
    },
    CheckSpec {
        name: "lemma1_2",
        statement: "if m or n is odd then T^(m) T^(n) lies in T^(m+n-1)",
        defaults: &[("m", 3), ("n", 2), ("rank", 4), ("char", 0), ("max_deg", 6)],
    },
    CheckSpec {
        name: "lemma1_3",
        statement: "[T^(n), a, b] + [T^(n), [a, b]] lies in T^(n+2)",
        defaults: &[("n", 2), ("rank", 3), ("char", 0), ("max_deg", 6)],
    },
    CheckSpec {
        name: "eq1_3",
        statement: "[x,y,z,t][x,y] lies in T^(5)",
        defaults: &[("char", 0)],
    },
    CheckSpec {
        name: "corollary1",
        statement: "T^(n-1) is central modulo T^(n) in rank 3",
        defaults: &[("n", 4), ("rank", 3), ("char", 0), ("max_deg", 6)],
    },
    CheckSpec {
        name: "theorem2",
        statement: "a polynomial in three variables lies in T^(n) iff its weight is at least n",
        defaults: &[("n", 4), ("rank", 3), ("char", 0), ("max_deg", 7)],
    },
    CheckSpec {
        name: "corollary2",
        statement: "[x,y]^(n-1) lies in T^(n) and [x,y]^(n-2) does not",
        defaults: &[("n", 4), ("char", 0)],
    },
    CheckSpec {
        name: "lemma2_1",
        statement: "T^(m) is spanned by x M_1 ... M_k with M_i in {R_y, D_y} and at least m-1 factors D_y",
        defaults: &[("m", 3), ("rank", 2), ("char", 0), ("max_deg", 6)],
    },
    CheckSpec {
        name: "frobenius",
        statement: "for q = p^s >= n-1: (a+b)^q = a^q + b^q, (ab)^q = a^q b^q, [a, b^q] = 0 in F_2^(n)",
        defaults: &[("n", 4), ("p", 5), ("q", 5)],
    },
    CheckSpec {
        name: "eq3_1",
        statement: "x^(Mq)[x^N, y] = sum_i C(N,i) x^(Mq+N-i) [x,y,x,...,x]",
        defaults: &[("p", 5), ("q", 5), ("mult_max", 2)],
    },
    CheckSpec {
        name: "theorem3",
        statement: "in characteristic 0 the center of F_r^(n) is T^(n-1)(F_r^(n))",
        defaults: &[("n", 4), ("rank", 2), ("char", 0), ("max_deg", 6)],
    },
    CheckSpec {
        name: "theorem4",
        statement: "in characteristic p the center of F_r^(n) is T^(n-1) + Z_q with Z_q the T-space of x^q",
        defaults: &[("n", 4), ("rank", 2), ("p", 5), ("q", 5), ("max_deg", 7)],
    },
    CheckSpec {
        name: "corollary3",
        statement: "Z(F_2^(n)) = F_2^(n) ∩ Z(F^(n)); [x,y]z is central in F_3^(3) but not in F^(3)",
        defaults: &[("n", 4), ("char", 0), ("max_deg", 6)],
    },
    CheckSpec {
        name: "sec4_1",
        statement: "the T-space of x^(p^s) in K[x1,x2] is K[x1^(p^s), x2^(p^s)]",
        defaults: &[("p", 5), ("s", 1), ("max_deg", 15), ("span_deg", 10)],
    },
    CheckSpec {
        name: "lemma4_1",
        statement: "f(q1,q2) with (q1,p) = 1 is a T-consequence of [x,y]",
        defaults: &[("p", 5), ("q_max", 12)],
    },
    CheckSpec {
        name: "lemma4_2",
        statement: "f(p,p) is not a T-consequence of [x,y]",
        defaults: &[("p", 5)],
    },
    CheckSpec {
        name: "theorem5",
        statement: "every substitution from f(p^s,p^s) into bidegree (p^(s+1),p^(s+1)) has coefficient L in pZ",
        defaults: &[("p", 5), ("s", 1), ("q_max", 6), ("exp_max", 1)],
    },
    CheckSpec {
        name: "corollary4",
        statement: "f(p^s,p^s) is not a consequence of [x,y] and f(p^i,p^j), i,j < s",
        defaults: &[("p", 5), ("s_max", 2)],
    },
    CheckSpec {
        name: "lemma5_1",
        statement: "a -> [a, x2, ..., xn] is a derivation modulo I_(n+1)",
        defaults: &[("n", 2), ("rank", 3), ("char", 0), ("mono_deg", 3)],
    },
    CheckSpec {
        name: "theorem6_arith",
        statement: "i + j - 2 = s has a solution with i, j >= 1 not divisible by p",
        defaults: &[("p", 5), ("s_max", 1000)],
    },
    CheckSpec {
        name: "theorem6_factor",
        statement: "the ideal chain T_k inside T^(n-1)(F_2^(n)) has T-simple factors",
        defaults: &[("n", 4), ("p", 5), ("max_deg", 8)],
    },
    CheckSpec {
        name: "remark5",
        statement: "[x,y]^2 and [x,y,x,y] are independent in F_2^(5); the T-ideals of [x,y]^2 + a[x,y,x,y] differ for distinct a",
        defaults: &[("alpha", 0), ("beta", 1), ("max_deg", 6)],
    },
    CheckSpec {
        name: "kernel",
        statement: "every central element of F^(n) lies in the kernel: [fg, h] lies in T^(n)",
        defaults: &[("n", 4), ("rank", 2), ("char", 0), ("max_deg", 4), ("mono_deg", 2)],
    },
    CheckSpec {
        name: "f23_crosscheck",
        statement: "the closed-form model of F_2^(3) has kernel T^(3); PBW decomposition round-trips",
        defaults: &[("char", 0), ("max_deg", 6)],
    },
    CheckSpec {
        name: "tie_break",
        statement: "the weight function does not depend on how equal-degree Lie basis elements are ordered",
        defaults: &[("n", 3), ("rank", 3), ("char", 0), ("max_deg", 6)],
    },
];

pub fn catalog_entry(name: &str) -> Option<&'static CheckSpec> {
    CATALOG.iter().find(|c| c.name == name)
}

/// A check name with its full parameter map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRequest {
    pub name: String,
    pub params: BTreeMap<String, i64>,
}

impl CheckRequest {
    /// The named check with its default parameters.
    pub fn new(name: &str) -> Result<Self, VerifyError> {
        let spec = catalog_entry(name).ok_or_else(|| VerifyError::UnknownCheck(name.to_string()))?;
        let params = spec.defaults.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Ok(CheckRequest { name: name.to_string(), params })
    }

    /// Overrides one parameter; unknown parameter names are rejected by
    /// [`run_check`].
    pub fn with(mut self, key: &str, value: i64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    fn validate(&self) -> Result<&'static CheckSpec, VerifyError> {
        let spec = catalog_entry(&self.name).ok_or_else(|| VerifyError::UnknownCheck(self.name.clone()))?;
        for k in self.params.keys() {
            if !spec.defaults.iter().any(|(d, _)| d == k) {
                return Err(VerifyError::InvalidParam { name: k.clone(), reason: format!("not a parameter of {}", self.name) });
            }
        }
        for (k, _) in spec.defaults {
            if !self.params.contains_key(*k) {
                return Err(VerifyError::InvalidParam { name: k.to_string(), reason: "missing".into() });
            }
        }
        for key in ["max_deg", "max_n", "samples", "q_max", "s_max", "span_deg", "mono_deg", "exp_max"] {
            if let Some(&v) = self.params.get(key) {
                if v <= 0 {
                    return Err(VerifyError::InvalidParam { name: key.into(), reason: format!("must be positive, got {v}") });
                }
            }
        }
        for key in ["char", "p"] {
            if let Some(&v) = self.params.get(key) {
                let ok = v >= 0 && FieldSpec::new(v as u64).is_ok() && !(key == "p" && v == 0);
                if !ok {
                    return Err(VerifyError::InvalidParam { name: key.into(), reason: format!("{v} is not 0 or a prime >= 5") });
                }
            }
        }
        Ok(spec)
    }
}

/// Runs one check. The result is deterministic given the request; only
/// `elapsed_ms` varies between runs.
pub fn run_check(req: &CheckRequest) -> Result<CheckResult, VerifyError> {
    let spec = req.validate()?;
    let start = Instant::now();
    let mut out = Outcome::default();
    let params = Params(&req.params);
    let run = checks::dispatch(spec.name, &params, &mut out);
    let status = match run {
        Ok(()) if out.failed => Status::Fail,
        Ok(()) => Status::Pass,
        Err(e) if is_cap(&e) => {
            out.notes.push(format!("cap hit: {e}"));
            if out.failed {
                Status::Fail
            } else {
                Status::CapExceeded
            }
        }
        Err(e) => return Err(e),
    };
    out.dims.sort_by(|a, b| {
        (a.multidegree.iter().sum::<u32>(), &a.multidegree).cmp(&(b.multidegree.iter().sum::<u32>(), &b.multidegree))
    });
    Ok(CheckResult {
        check: req.name.clone(),
        params: req.params.clone(),
        status,
        dims: out.dims,
        counterexample: out.counterexample,
        notes: out.notes,
        elapsed_ms: start.elapsed().as_millis() as u64,
    })
}

fn is_cap(e: &VerifyError) -> bool {
    matches!(e, VerifyError::Tgrade(TgradeError::CapExceeded { .. }) | VerifyError::F23(F23Error::CapExceeded { .. }))
}

/// The default request of every catalog entry, in catalog order.
pub fn default_requests() -> Vec<CheckRequest> {
    CATALOG.iter().map(|c| CheckRequest::new(c.name).expect("catalog entry")).collect()
}

/// Accumulates what a check observed.
#[derive(Debug, Default)]
pub(crate) struct Outcome {
    dims: Vec<DimRecord>,
    counterexample: Option<String>,
    notes: Vec<String>,
    failed: bool,
}

impl Outcome {
    pub(crate) fn dim(&mut self, d: &MultiDegree, lhs: usize, rhs: usize) {
        self.dims.push(DimRecord { multidegree: d.0.clone(), lhs_dim: lhs, rhs_dim: rhs });
    }

    /// Records a failure; the first counterexample is kept.
    pub(crate) fn fail(&mut self, counterexample: String) {
        self.failed = true;
        if self.counterexample.is_none() {
            self.counterexample = Some(counterexample);
        }
    }

    pub(crate) fn note(&mut self, text: String) {
        self.notes.push(text);
    }

    pub(crate) fn merge(&mut self, other: Outcome) {
        self.dims.extend(other.dims);
        if let Some(c) = other.counterexample {
            self.fail(c);
        }
        self.failed |= other.failed;
        self.notes.extend(other.notes);
    }
}

/// Typed access to a request's parameters.
pub(crate) struct Params<'a>(&'a BTreeMap<String, i64>);

impl Params<'_> {
    pub(crate) fn int(&self, key: &str) -> i64 {
        self.0[key]
    }

    pub(crate) fn uint(&self, key: &str) -> Result<u32, VerifyError> {
        let v = self.int(key);
        u32::try_from(v).map_err(|_| VerifyError::InvalidParam { name: key.into(), reason: format!("must be nonnegative, got {v}") })
    }

    pub(crate) fn usize(&self, key: &str) -> Result<usize, VerifyError> {
        Ok(self.uint(key)? as usize)
    }

    pub(crate) fn field(&self, key: &str) -> Result<FieldSpec, VerifyError> {
        Ok(FieldSpec::new(self.uint(key)? as u64)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format '{s}' (expected json or text)")),
        }
    }
}

/// Writes the results as a JSON array or a summary table.
pub fn emit_report(results: &[CheckResult], format: Format, w: &mut dyn Write) -> io::Result<()> {
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *w, results)?;
            writeln!(w)
        }
        Format::Text => {
            writeln!(w, "{:<22} {:<13} {:>9}  params", "check", "status", "ms")?;
            for r in results {
                let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                writeln!(w, "{:<22} {:<13} {:>9}  {}", r.check, r.status.to_string(), r.elapsed_ms, params.join(" "))?;
                if let Some(c) = &r.counterexample {
                    writeln!(w, "    counterexample: {c}")?;
                }
                for n in &r.notes {
                    writeln!(w, "    note: {n}")?;
                }
            }
            let passed = results.iter().filter(|r| r.passed()).count();
            writeln!(w, "{passed}/{} checks passed", results.len())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        for req in default_requests() {
            req.validate().unwrap();
        }
    }

    #[test]
    fn unknown_check_and_param_rejected() {
        assert!(matches!(CheckRequest::new("nope"), Err(VerifyError::UnknownCheck(_))));
        let req = CheckRequest::new("theorem1").unwrap().with("bogus", 1);
        assert!(matches!(run_check(&req), Err(VerifyError::InvalidParam { .. })));
        let req = CheckRequest::new("theorem1").unwrap().with("char", 3);
        assert!(matches!(run_check(&req), Err(VerifyError::InvalidParam { .. })));
        let req = CheckRequest::new("frobenius").unwrap().with("p", 2);
        assert!(matches!(run_check(&req), Err(VerifyError::InvalidParam { .. })));
    }

    #[test]
    fn empty_report_is_an_empty_array() {
        let mut buf = Vec::new();
        emit_report(&[], Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v, serde_json::json!([]));
    }

    #[test]
    fn pass_has_no_counterexample_field() {
        let r = run_check(&CheckRequest::new("rank4_counterexample").unwrap()).unwrap();
        assert_eq!(r.status, Status::Pass);
        let v = serde_json::to_value([&r]).unwrap();
        assert!(v[0].get("counterexample").is_none());
        assert_eq!(v[0]["status"], "PASS");
        for key in ["check", "params", "status", "dims", "elapsed_ms"] {
            assert!(v[0].get(key).is_some(), "{key}");
        }
    }

    #[test]
    fn fail_carries_counterexample() {
        let r = CheckResult {
            check: "theorem1".into(),
            params: BTreeMap::new(),
            status: Status::Fail,
            dims: vec![],
            counterexample: Some("x*y - y*x".into()),
            notes: vec![],
            elapsed_ms: 0,
        };
        let mut buf = Vec::new();
        emit_report(&[r], Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v[0]["counterexample"], "x*y - y*x");
    }

    #[test]
    fn reports_are_deterministic() {
        let req = CheckRequest::new("corollary2").unwrap().with("n", 3);
        let mut a = run_check(&req).unwrap();
        let mut b = run_check(&req).unwrap();
        a.elapsed_ms = 0;
        b.elapsed_ms = 0;
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
