use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn profinite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_profinite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = profinite(&all);
    let v = serde_json::from_slice(&out.stdout).expect("json on stdout");
    (out.status.code().unwrap(), v)
}

fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn passing_run_exits_zero() {
    let (code, v) = json_report(&["omega-commute", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"], "pass");
    assert_eq!(v["config"]["n"], 4);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
    assert_eq!(v["stats"]["levels"].as_array().unwrap().len(), 3);
}

#[test]
fn same_config_same_report() {
    let args = ["cantor-kernel", "--samples", "300", "--seed", "11"];
    let (_, a) = json_report(&args);
    let (_, b) = json_report(&args);
    assert_eq!(without_timing(a), without_timing(b));
    let (_, c) = json_report(&["polish-roundtrip", "--samples", "200", "--seed", "3"]);
    let (_, d) = json_report(&["polish-roundtrip", "--samples", "200", "--seed", "3"]);
    assert_eq!(without_timing(c), without_timing(d));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(profinite(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(profinite(&["omega-commute", "--n", "1"]).status.code(), Some(2));
    assert_eq!(profinite(&["collapse", "--seed", "3"]).status.code(), Some(2));
    assert_eq!(profinite(&["theta4", "a(", "b"]).status.code(), Some(2));
    assert_eq!(profinite(&["check-derivation", "/no/such/file.json"]).status.code(), Some(2));
}

#[test]
fn theta_queries() {
    let (code, v) = json_report(&["theta4", "ab(a)^w", "ab(ab)^w"]);
    assert_eq!((code, v["stats"]["equivalent"].as_bool()), (0, Some(true)));
    let (code, _) = json_report(&["theta4", "(a)^w", "(b)^w"]);
    assert_eq!(code, 1);
    let (code, _) = json_report(&["theta3", "a(b)^w", "b(a)^w"]);
    assert_eq!(code, 0);
}

fn export(dir: &Path) {
    let out = profinite(&["export-scripts", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn exported_scripts_check() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let file = dir.path().join("abab-a-tail.json");
    let (code, v) = json_report(&["check-derivation", file.to_str().unwrap()]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["stats"]["failed_steps"], 0);
}

#[test]
fn falsified_generators_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let file = dir.path().join("b-tail-to-aba-tail.json");
    let mut script: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    // Swap in a pair that is not a defining pair of the congruence.
    script["generators"][0] = serde_json::json!(["(a)^w", "(b)^w"]);
    std::fs::write(&file, script.to_string()).unwrap();
    let (code, v) = json_report(&["check-derivation", file.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(v["result"], "fail");
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn too_few_instances_fail() {
    let dir = tempfile::tempdir().unwrap();
    export(dir.path());
    let file = dir.path().join("abab-a-tail.json");
    let (code, _) = json_report(&["check-derivation", file.to_str().unwrap(), "--k", "8"]);
    assert_eq!(code, 0);
    let (code, _) = json_report(&["check-derivation", file.to_str().unwrap(), "--k", "40"]);
    assert_eq!(code, 1);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = profinite(&["collapse", "--n", "10", "--points", "2", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["config"]["command"], "collapse");
}

#[test]
fn text_report_names_the_verdict() {
    let out = profinite(&["polish-counterexample", "--k", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("polish-counterexample: PASS"), "{text}");
}
