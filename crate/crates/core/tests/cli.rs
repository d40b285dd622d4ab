use std::fs;
use std::path::{Path, PathBuf};

use cstar_seminorms::cli::{run, EXIT_INPUT, EXIT_OK};

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Outcome {
    let mut argv = vec!["cstar-seminorms"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    Outcome {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn diag_file(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let n = values.len();
    let rows: Vec<String> = (0..n)
        .map(|i| {
            let row: Vec<String> = (0..n).map(|j| if i == j { values[i].to_string() } else { "0".into() }).collect();
            format!("[{}]", row.join(", "))
        })
        .collect();
    write(dir, name, &format!("{{\"blocks\": [{{\"dim\": {n}, \"re\": [{}]}}]}}", rows.join(", ")))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn norm_of_the_anchor_pair() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.json", &[4.0, 1.0]);
    let f = diag_file(dir.path(), "f.json", &[1.0, -1.0]);
    let r = cli(&["norm", "--algebra-file", s(&a), "--functional-file", s(&f), "--method", "closed"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(r.out.trim(), "5.0");

    let r = cli(&["norm", "--algebra-file", s(&a), "--functional-file", s(&f), "--method", "variational"]);
    assert_eq!(r.code, EXIT_OK);
    let value: f64 = r.out.trim().parse().unwrap();
    assert!((value - 5.0).abs() <= 5e-7);
}

#[test]
fn norm_with_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.json", &[4.0, 1.0]);
    let f = diag_file(dir.path(), "f.json", &[1.0, -1.0]);
    // r_{a^2}(f) = 16 + 1
    let r = cli(&["norm", "--algebra-file", s(&a), "--functional-file", s(&f), "--alpha", "2"]);
    assert_eq!((r.code, r.out.trim()), (EXIT_OK, "17.0"));
}

#[test]
fn decide_on_a_singular_element() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.json", &[2.0, 0.0]);
    let r = cli(&["decide", "--algebra-file", s(&a)]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out.lines().next(), Some("not invertible"));
    assert!(r.out.contains("kernel witness"));
}

#[test]
fn decide_on_an_invertible_element() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.json", &[4.0, 1.0]);
    let r = cli(&["decide", "--algebra-file", s(&a), "--seed", "3"]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out.lines().next(), Some("invertible"));
    assert!(r.out.contains("spectral bounds 1.0 4.0"));
}

#[test]
fn constants_prints_analytic_values() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.json", &[4.0, 1.0]);
    let r = cli(&["constants", "--algebra-file", s(&a), "--alpha", "1", "--beta", "2", "--trials", "50"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("analytic c 1.0 C 4.0"), "{}", r.out);
    assert!(r.out.contains("samples 50"));
}

#[test]
fn constants_on_a_singular_element_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.json", &[2.0, 0.0]);
    let r = cli(&["constants", "--algebra-file", s(&a), "--alpha", "1", "--beta", "2"]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.err.contains("not invertible"));
}

#[test]
fn malformed_json_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "bad.json", "{\"blocks\": [\n  {\"dim\": 2,\n   \"re\": [[1, 0], [0 1]]}\n]}");
    let f = diag_file(dir.path(), "f.json", &[1.0, -1.0]);
    let r = cli(&["norm", "--algebra-file", s(&a), "--functional-file", s(&f)]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.err.contains("bad.json"), "{}", r.err);
    assert!(r.err.contains("line 3"), "{}", r.err);
}

#[test]
fn structure_mismatch_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.json", &[4.0, 1.0]);
    let f = diag_file(dir.path(), "f.json", &[1.0, -1.0, 2.0]);
    let r = cli(&["norm", "--algebra-file", s(&a), "--functional-file", s(&f)]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.err.contains("do not match"), "{}", r.err);
}

#[test]
fn missing_file_and_bad_flags() {
    let r = cli(&["decide", "--algebra-file", "/nonexistent/a.json"]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.err.contains("/nonexistent/a.json"));
    assert_eq!(cli(&["verify", "--suite", "everything"]).code, EXIT_INPUT);
    assert_eq!(cli(&["frobnicate"]).code, EXIT_INPUT);
    assert_eq!(cli(&[]).code, EXIT_INPUT);
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
}

#[test]
fn non_positive_element_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let a = diag_file(dir.path(), "a.json", &[1.0, -1.0]);
    let f = diag_file(dir.path(), "f.json", &[1.0, -1.0]);
    let r = cli(&["norm", "--algebra-file", s(&a), "--functional-file", s(&f)]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.err.contains("not positive"), "{}", r.err);
}

#[test]
fn verify_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("constants.csv");
    let r = cli(&["verify", "--suite", "power", "--seed", "1", "--trials", "20", "--out", s(&out), "--csv", s(&csv)]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.is_empty());
    assert!(r.err.contains("0 failures"));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);
    assert_eq!(report["suite"], "power");
    assert_eq!(report["failures"].as_array().unwrap().len(), 0);
    let table = fs::read_to_string(&csv).unwrap();
    assert!(table.starts_with("alpha,beta,analytic_c,analytic_C,empirical_min,empirical_max\n"));
    assert!(table.lines().count() > 1);
}

#[test]
fn verify_to_stdout_is_deterministic() {
    let first = cli(&["verify", "--suite", "closed", "--seed", "9", "--trials", "10"]);
    let second = cli(&["verify", "--suite", "closed", "--seed", "9", "--trials", "10"]);
    assert_eq!(first.code, EXIT_OK);
    assert!(first.out.starts_with('{'));
    assert_eq!(first.out, second.out);
}

#[test]
fn verify_with_unwritable_output_is_an_input_error() {
    let r = cli(&["verify", "--suite", "blowup", "--out", "/nonexistent/dir/report.json"]);
    assert_eq!(r.code, EXIT_INPUT);
}
