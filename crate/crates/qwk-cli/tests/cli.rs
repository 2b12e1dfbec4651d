use serde_json::Value;
use std::process::{Command, Output};

fn qwk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwk")).args(args).env_remove("QWK_JOBS").output().unwrap()
}

fn records(out: &Output) -> Vec<Value> {
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v.as_array().unwrap().clone()
}

fn is_rational(s: &str) -> bool {
    let s = s.strip_prefix('-').unwrap_or(s);
    let mut parts = s.splitn(2, '/');
    let ok = |p: Option<&str>| p.is_some_and(|p| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit()));
    let (p, q) = (parts.next(), parts.next());
    ok(p) && (q.is_none() || ok(q))
}

/// The record contract of `schema/record.schema.json`.
fn assert_schema(recs: &[Value]) {
    for r in recs {
        let obj = r.as_object().unwrap();
        assert_eq!(obj.len(), 4, "{r}");
        let kind = r["kind"].as_str().unwrap();
        assert!(["correlator", "hurwitz", "identity", "table", "verdict"].contains(&kind));
        assert!(r["key"].is_object() && r["metadata"].is_object());
        let v = r["value"].as_str().unwrap();
        assert!(is_rational(v) || ["true", "false", "pass", "fail", "equal", "mismatch"].contains(&v), "{v}");
    }
}

fn value_of(out: &Output) -> String {
    records(out)[0]["value"].as_str().unwrap().to_string()
}

#[test]
fn correlator_examples() {
    for (g, d, want) in [("1", "2", "1/24"), ("2", "2", "7/5760"), ("0", "0,0,0", "1")] {
        let out = qwk(&["correlator", "--g", g, "--d", d]);
        assert!(out.status.success());
        assert_eq!(value_of(&out), want);
        assert_schema(&records(&out));
    }
}

#[test]
fn hurwitz_oracle_flag() {
    let out = qwk(&["correlator", "--g", "2", "--d", "1,4", "--hurwitz-oracle"]);
    assert!(out.status.success());
    let recs = records(&out);
    assert_schema(&recs);
    assert_eq!(recs[1]["value"], "1/192");
    assert_eq!(recs[2]["value"], "equal");
    assert_eq!(qwk(&["correlator", "--g", "0", "--d", "0", "--hurwitz-oracle"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qwk(&["correlator", "--g", "x", "--d", "1"]).status.code(), Some(2));
    assert_eq!(qwk(&["correlator", "--g", "1", "--d", "1,-2"]).status.code(), Some(2));
    assert_eq!(qwk(&["correlator", "--g", "1", "--d", ""]).status.code(), Some(2));
    assert_eq!(qwk(&["verify", "main-theorem", "--g-max", "9"]).status.code(), Some(2));
    assert_eq!(qwk(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(qwk(&["table", "--format", "xml"]).status.code(), Some(2));
}

#[test]
fn decimal_is_marked() {
    let out = qwk(&["--decimal", "correlator", "--g", "1", "--d", "2"]);
    let recs = records(&out);
    assert_eq!(recs[0]["value"], "1/24");
    assert!(recs[0]["metadata"]["decimal"].as_str().unwrap().starts_with("~0.041666"));
}

#[test]
fn verify_suites() {
    let out = qwk(&["verify", "main-theorem", "--g-max", "1", "--n-max", "3", "--sum-max", "5"]);
    assert!(out.status.success());
    let recs = records(&out);
    assert_schema(&recs);
    assert_eq!(recs.last().unwrap()["value"], "pass");
    assert!(qwk(&["verify", "string", "--g-max", "1", "--n-max", "2"]).status.success());
    assert!(qwk(&["verify", "bracket-oracle", "--cases", "3", "--modes", "3"]).status.success());
    let ids = qwk(&["verify", "identities", "--order", "4"]);
    assert!(ids.status.success());
    assert!(records(&ids).iter().filter(|r| r["kind"] == "identity").all(|r| r["value"] == "0"));
}

#[test]
fn verify_reports_first_failure() {
    // The published table disagrees with the engine on this one key.
    let out = qwk(&["verify", "golden"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("g=2 d=[1,6]"));
    assert_eq!(records(&out).last().unwrap()["value"], "fail");
}

#[test]
fn tables() {
    let md = String::from_utf8(qwk(&["table", "--g-max", "1", "--format", "md"]).stdout).unwrap();
    assert!(md.contains("| t2 | 1/24 | 1/24 |"));
    assert!(md.contains("| t0^2 t2 | 1/24 | 1/48 |"));
    let out = qwk(&["table", "--g-max", "2", "--format", "json"]);
    let recs = records(&out);
    assert_schema(&recs);
    for v in ["1/1920", "1/576", "7/5760"] {
        assert!(recs.iter().any(|r| r["value"] == v && r["key"]["g"] == 2), "{v}");
    }
    let csv = String::from_utf8(qwk(&["table", "--n-max", "0", "--format", "csv"]).stdout).unwrap();
    assert_eq!(csv.trim(), "g,level,d,monomial,correlator,coefficient");
    assert!(records(&qwk(&["table", "--n-max", "0"])).is_empty());
}

#[test]
fn output_is_deterministic_across_job_counts() {
    let a = qwk(&["--jobs", "1", "table", "--g-max", "2", "--format", "csv"]);
    let b = qwk(&["--jobs", "4", "table", "--g-max", "2", "--format", "csv"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(qwk(&["--jobs", "0", "table"]).status.code(), Some(2));
}
