use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oper-slope"))
}

fn run_with_input(args: &[&str], doc: &str) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("in.json");
    fs::write(&path, doc).unwrap();
    bin().args(args).arg("--in").arg(&path).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const SL2_CUBIC: &str = r#"{"algebra": "A1", "v": [{"b": 1, "terms": [[-3, "1"]]}]}"#;

#[test]
fn slope_of_sl2_oper_with_cubic_pole() {
    let out = run_with_input(&["slope"], SL2_CUBIC);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out), serde_json::json!({ "slope": "1/2" }));
}

#[test]
fn slope_of_regular_oper_is_zero() {
    let out = run_with_input(&["slope"], r#"{"algebra": "A2", "v": [{"b": 1, "terms": []}, {"b": 1, "terms": []}]}"#);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["slope"], "0");
}

#[test]
fn three_slope_routes_agree() {
    let doc = r#"{"algebra": "A2", "v": [{"b": 1, "terms": [[-3, "2"]]}, {"b": 1, "terms": [[-5, "1"], [-1, "7/3"]]}]}"#;
    let slopes: Vec<Value> = ["slope", "reduce", "newton-slope"]
        .iter()
        .map(|c| stdout_json(&run_with_input(&[c], doc))["slope"].clone())
        .collect();
    assert_eq!(slopes, vec![Value::from("2/3"); 3]);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["sugawara-check", "--algebra", "A2", "--x", "1/3,1/3", "--r", "1/2", "--modes", "0:6"];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn canonical_form_round_trips_through_slope() {
    let conn = r#"{"algebra": "A1", "components": {
        "e": {"b": 1, "terms": [[0, "1"]], "prec": "exact"},
        "f": {"b": 1, "terms": [[-4, "2"], [-1, "1/3"]], "prec": "exact"},
        "h": {"b": 1, "terms": [[-2, "5"]], "prec": "exact"}}}"#;
    let out = run_with_input(&["canonicalize"], conn);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert!(report["word"].is_array());
    let oper = serde_json::to_string(&report["oper"]).unwrap();
    let again = run_with_input(&["slope"], &oper);
    assert_eq!(again.status.code(), Some(0));
    assert!(stdout_json(&again)["slope"].is_string());
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let args = ["mp", "--algebra", "A1", "--x", "1/2", "--r", "1/2", "--plus", "--jumps", "0:2"];
    let direct = bin().args(args).output().unwrap();
    let to_file = bin().args(args).arg("--out").arg(&path).output().unwrap();
    assert_eq!(to_file.status.code(), Some(0));
    assert!(to_file.stdout.is_empty());
    assert_eq!(fs::read(&path).unwrap(), direct.stdout);
    let report = stdout_json(&direct);
    assert_eq!(report["powers"], serde_json::json!({ "e": 1, "f": 2, "h": 1 }));
    assert_eq!(report["jumps"], serde_json::json!(["0", "1/2", "1", "3/2", "2"]));
}

#[test]
fn hyperspecial_sugawara_modes_vanish_from_the_bound() {
    let out = bin().args(["sugawara-check", "--algebra", "A1", "--x", "0", "--r", "0", "--modes", "0:6"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["bound"], 2);
    for m in 2..=6 {
        assert_eq!(report["modes"][m.to_string()], "zero");
    }
}

#[test]
fn exit_codes_follow_error_kind() {
    let schema = run_with_input(&["slope"], "{not json");
    assert_eq!(schema.status.code(), Some(3));

    let unknown_label = run_with_input(&["slope"], r#"{"algebra": "A1", "components": {"x": {"b": 1, "terms": []}}}"#);
    assert_eq!(unknown_label.status.code(), Some(3));

    let not_reduced = r#"{"algebra": "A1", "components": {
        "e": {"b": 1, "terms": [[0, "1"]], "prec": "exact"},
        "f": {"b": 1, "terms": [[-3, "1"]], "prec": "exact"}}}"#;
    assert_eq!(run_with_input(&["slope"], not_reduced).status.code(), Some(1));

    let thin = r#"{"algebra": "A1", "v": [{"b": 1, "terms": [], "prec": -5}]}"#;
    assert_eq!(run_with_input(&["slope"], thin).status.code(), Some(2));

    let bad_flag = bin().args(["mp", "--algebra", "A1", "--x", "0", "--r", "1/2", "--jumps", "2:0"]).output().unwrap();
    assert_eq!(bad_flag.status.code(), Some(3));

    let usage = bin().args(["slope", "--bogus"]).output().unwrap();
    assert_eq!(usage.status.code(), Some(3));
}

#[test]
fn selftest_succeeds() {
    let out = bin().arg("selftest").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = stdout_json(&out);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 8);
    assert_eq!(report["unexpected_failures"], serde_json::json!([]));
}
