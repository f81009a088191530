use std::process::{Command, Output};

use serde_json::Value;

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify"))
        .args(args)
        .env("LIENIL_THREADS", "2")
        .output()
        .expect("verify binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn passing_check_exits_zero_with_json_report() {
    let out = verify(&["rank4_counterexample"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let r = &v.as_array().unwrap()[0];
    assert_eq!(r["check"], "rank4_counterexample");
    assert_eq!(r["status"], "PASS");
    assert!(r.get("counterexample").is_none());
    assert_eq!(r["dims"][0]["multidegree"], serde_json::json!([1, 1, 1, 1]));
}

#[test]
fn failing_check_exits_one_with_counterexample() {
    let out = verify(&["frobenius", "--n", "6", "--char", "5"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let r = &v[0];
    assert_eq!(r["status"], "FAIL");
    assert_eq!(r["params"]["p"], 5);
    assert!(r["counterexample"].as_str().unwrap().contains("x*y^4"));
}

#[test]
fn invalid_requests_exit_two() {
    for args in [
        vec!["no_such_check"],
        vec!["corollary2", "--char", "3"],
        vec!["corollary2", "--param", "bogus=1"],
        vec!["frobenius", "--param", "q=6"],
        vec!["corollary2", "--param", "n"],
    ] {
        let out = verify(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn flags_and_params_override_defaults() {
    let out = verify(&["corollary2", "--n", "5", "--char", "7", "--param", "n=6"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v[0]["params"]["n"], 6);
    assert_eq!(v[0]["params"]["char"], 7);
}

#[test]
fn text_format_is_a_table() {
    let out = verify(&["theorem6_arith", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("theorem6_arith") && l.contains("PASS")));
    assert!(text.contains("1/1 checks passed"));
}

#[test]
fn reports_are_reproducible_apart_from_timing() {
    let strip = |mut v: Value| {
        for r in v.as_array_mut().unwrap() {
            r.as_object_mut().unwrap().remove("elapsed_ms");
        }
        v
    };
    let a = strip(json(&verify(&["lemma1_3", "--max-deg", "5"])));
    let b = strip(json(&verify(&["lemma1_3", "--max-deg", "5"])));
    assert_eq!(a, b);
}

#[test]
fn list_names_every_check() {
    let out = verify(&["--list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["identities", "theorem6_factor", "kernel", "tie_break"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
