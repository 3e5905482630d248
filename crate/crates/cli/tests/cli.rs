use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_tlm-forge");
const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../../fixtures");

fn tlm(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env("TLMFORGE_COLOR", "0").output().unwrap()
}

fn fixture(name: &str) -> String {
    format!("{FIXTURES}/{name}")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn run_then_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let run = tlm(&["run", &fixture("abs.json"), "--trace", p(&trace)]);
    assert_eq!(run.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&run.stdout).contains("16000 ps"));
    let check = tlm(&["check", &fixture("abs.json"), p(&trace)]);
    assert_eq!(check.status.code(), Some(0));
    let report = String::from_utf8_lossy(&check.stdout);
    assert!(report.contains("PASS Brake"), "{report}");
    assert!(report.trim_end().ends_with("overall: PASS"));
}

#[test]
fn missed_deadline_fails_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.csv");
    let tight = dir.path().join("tight.json");
    let text = std::fs::read_to_string(fixture("abs.json")).unwrap().replace("\"16ns\"", "\"15ns\"");
    std::fs::write(&tight, text).unwrap();
    assert_eq!(tlm(&["run", p(&tight), "--trace", p(&trace)]).status.code(), Some(0));
    let check = tlm(&["check", p(&tight), p(&trace)]);
    assert_eq!(check.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&check.stdout).contains("FAIL Brake"));
}

#[test]
fn run_without_trace_prints_the_log() {
    let out = tlm(&["run", &fixture("abs.json")]);
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read(fixture("golden/abs_trace.csv")).unwrap();
    assert_eq!(out.stdout, golden);
}

#[test]
fn validate_reports_codes() {
    let out = tlm(&["validate", &fixture("invalid/e003.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("E003"));
    assert_eq!(tlm(&["validate", &fixture("abs.json")]).status.code(), Some(0));
}

#[test]
fn run_refuses_invalid_descriptions() {
    let out = tlm(&["run", &fixture("invalid/e004.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E004"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_2() {
    for args in
        [vec!["run"], vec!["frobnicate"], vec!["run", "/no/such/file.json"], vec!["render", "/no/such/trace.csv"]]
    {
        let out = tlm(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"), "{args:?}");
    }
    let abs = fixture("abs.json");
    assert_eq!(tlm(&["run", &abs, "--quantum", "ten"]).status.code(), Some(2));
    assert_eq!(tlm(&["render", &abs, "--svg", "x.svg", "--text"]).status.code(), Some(2));
}

#[test]
fn event_limit_is_a_runtime_error() {
    let out = tlm(&["run", &fixture("abs.json"), "--event-limit", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E-EVENT-LIMIT"));
}

#[test]
fn malformed_inputs_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"cpus\": [,]\n}\n").unwrap();
    let out = tlm(&["validate", p(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));
    let csv = dir.path().join("bad.csv");
    std::fs::write(&csv, "not a trace\n").unwrap();
    let out = tlm(&["render", p(&csv)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("E-TRACE-SYNTAX"));
}

#[test]
fn text_render_is_uncolored_off_a_terminal() {
    let out = Command::new(BIN)
        .args(["render", &fixture("golden/abs_trace.csv"), "--text"])
        .env_remove("TLMFORGE_COLOR")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stdout.contains(&0x1b));
    assert!(String::from_utf8_lossy(&out.stdout).contains("16 ns|"));
}

#[test]
fn quantum_override_keeps_the_abs_result() {
    let out = tlm(&["run", &fixture("abs.json"), "--quantum", "1us"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("Brake,0,0,16000,0,OK"));
}

#[test]
fn export_writes_only_into_the_named_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("nested/gen");
    let out = tlm(&["export", &fixture("abs.json"), "--out", p(&out_dir)]);
    assert_eq!(out.status.code(), Some(0));
    let mut names: Vec<_> =
        std::fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().file_name().into_string().unwrap()).collect();
    names.sort();
    assert_eq!(names, ["Module0.h", "Module1.h", "Module2.h", "top.cpp"]);
    let top: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(top.len(), 1);
}
