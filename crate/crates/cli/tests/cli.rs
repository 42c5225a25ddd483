use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const REL: f64 = 1e-9;
// Residual-type fields are round-off sized, so only their order of magnitude is pinned.
const FLOOR: f64 = 1e-12;
const NOISE_FLOOR: f64 = 1e-9;

fn odeim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_odeim")).args(args).output().expect("binary runs")
}

fn golden(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap()
}

fn noisy(key: &str) -> bool {
    ["residual", "deviation", "relative"].iter().any(|s| key.contains(s))
}

fn compare(path: &str, got: &Value, want: &Value, loose: bool) {
    match (got, want) {
        (Value::Object(g), Value::Object(w)) => {
            let gk: Vec<_> = g.keys().collect();
            let wk: Vec<_> = w.keys().collect();
            assert_eq!(gk, wk, "keys differ at {path}");
            for (k, v) in w {
                compare(&format!("{path}.{k}"), &g[k], v, loose || noisy(k));
            }
        }
        (Value::Array(g), Value::Array(w)) => {
            assert_eq!(g.len(), w.len(), "length differs at {path}");
            for (i, (a, b)) in g.iter().zip(w).enumerate() {
                compare(&format!("{path}[{i}]"), a, b, loose);
            }
        }
        (Value::Number(a), Value::Number(b)) => {
            let (a, b) = (a.as_f64().unwrap(), b.as_f64().unwrap());
            let floor = if loose { NOISE_FLOOR } else { FLOOR };
            assert!((a - b).abs() <= REL * a.abs().max(b.abs()) + floor, "{path}: {a} vs {b}");
        }
        _ => assert_eq!(got, want, "value differs at {path}"),
    }
}

fn check(args: &[&str], name: &str) {
    let out = odeim(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let got: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(got["schema"], "odeim/1");
    compare("$", &got, &golden(name), false);
}

#[test]
fn masses_e6() {
    check(&["masses", "--algebra", "E6"], "masses_e6.json");
}

#[test]
fn masses_d5() {
    check(&["masses", "--algebra", "D5"], "masses_d5.json");
}

#[test]
fn repcheck_a2() {
    check(&["repcheck", "--algebra", "A2"], "repcheck_a2.json");
}

#[test]
fn psicheck_a2() {
    check(&["psicheck", "--algebra", "A2"], "psicheck_a2.json");
}

#[test]
fn q_table_a2() {
    check(&["q", "--algebra", "A2", "--ell", "0.3433,0.3167", "--grid=-2:2:3"], "q_a2.json");
}

#[test]
fn bethe_a1_zero_ell() {
    check(&["bethe", "--algebra", "A1", "--window", "0:12"], "bethe_a1.json");
}

#[test]
fn airy_a3_checked() {
    check(&["airy", "--family", "A", "--n", "3", "--grid", "0.5:2:4", "--check"], "airy_a3.json");
}

#[test]
fn csv_has_header_and_rows() {
    let out = odeim(&["--format", "csv", "masses", "--algebra", "D5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert!(!rdr.headers().unwrap().is_empty());
    assert_eq!(rdr.records().count(), 5);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("odeim-cli-{}.json", std::process::id()));
    let out = odeim(&["masses", "--algebra", "A3", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(doc["command"], "masses");
}

#[test]
fn unknown_algebra_is_a_usage_error() {
    let out = odeim(&["masses", "--algebra", "G2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown algebra"));
}

#[test]
fn forbidden_rotation_has_its_own_code() {
    let out = odeim(&["airy", "--family", "D", "--n", "3", "--k", "2"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn zero_ell_with_weyl_word() {
    let out = odeim(&["q", "--algebra", "A2", "--word", "1", "--grid", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["samples"].as_array().unwrap().len(), 1);
}
