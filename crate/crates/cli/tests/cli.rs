use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn uiwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uiwalk"))
        .args(args)
        .output()
        .expect("run uiwalk")
}

fn json(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

fn explore_newsreader(out: &Path, output: &str) -> Output {
    uiwalk(&[
        "explore",
        "corpus:newsreader",
        "--output",
        output,
        "--seed",
        "7",
        "--out-dir",
        out.to_str().unwrap(),
    ])
}

#[test]
fn explore_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let run = explore_newsreader(dir.path(), "both");
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));
    let summary = json(&run.stdout);
    assert_eq!(summary["states"], 12);
    assert_eq!(summary["termination"]["reason"], "exhausted");
    for f in ["model.json", "graph.json", "graph.dot", "coverage.csv", "summary.json"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    for i in 0..12 {
        assert!(dir.path().join(format!("snapshots/S{i}.json")).is_file());
    }
    let csv = std::fs::read_to_string(dir.path().join("coverage.csv")).unwrap();
    assert!(csv.starts_with("elapsed_ms,states,transitions,events\n"));
    let cov = json(&std::fs::read(dir.path().join("summary.json")).unwrap());
    assert_eq!(cov["state_coverage"], 1.0);
    assert!(std::fs::read_to_string(dir.path().join("graph.dot")).unwrap().starts_with("digraph"));
}

#[test]
fn output_selects_documents() {
    let dir = tempfile::tempdir().unwrap();
    assert!(explore_newsreader(dir.path(), "graph").status.success());
    assert!(dir.path().join("graph.dot").is_file());
    assert!(!dir.path().join("coverage.csv").exists());
    let dir = tempfile::tempdir().unwrap();
    assert!(explore_newsreader(dir.path(), "report").status.success());
    assert!(!dir.path().join("graph.dot").exists());
    assert!(dir.path().join("coverage.csv").is_file());
    assert!(dir.path().join("model.json").is_file());
}

#[test]
fn reproduce_from_saved_model() {
    let dir = tempfile::tempdir().unwrap();
    assert!(explore_newsreader(dir.path(), "both").status.success());
    let model = dir.path().join("model.json");
    let run = uiwalk(&["reproduce", "--target", "6", "--model", model.to_str().unwrap(), "corpus:newsreader"]);
    assert_eq!(run.status.code(), Some(0));
    let result = json(&run.stdout);
    assert_eq!(result["target"], 6);
    assert_eq!(result["outcome"], "reached_exact");
}

#[test]
fn reproduce_without_model_explores_first() {
    let run = uiwalk(&["reproduce", "--target", "3", "corpus:cycles"]);
    assert_eq!(run.status.code(), Some(0));
    assert_eq!(json(&run.stdout)["outcome"], "reached_exact");
}

#[test]
fn failed_reproduction_exits_1_with_result() {
    let dir = tempfile::tempdir().unwrap();
    assert!(explore_newsreader(dir.path(), "both").status.success());
    let model = dir.path().join("model.json");
    // A model of one app replayed against another.
    let run = uiwalk(&["reproduce", "--target", "6", "--model", model.to_str().unwrap(), "corpus:settings"]);
    assert_eq!(run.status.code(), Some(1));
    assert_eq!(json(&run.stdout)["outcome"], "failed");
}

#[test]
fn operational_errors_exit_1() {
    let run = uiwalk(&["explore", "/nonexistent/app.json"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("cannot read app spec"));
    let run = uiwalk(&["explore", "corpus:nope"]);
    assert_eq!(run.status.code(), Some(1));
    let run = uiwalk(&["reproduce", "--target", "99", "corpus:cycles"]);
    assert_eq!(run.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&run.stderr).contains("unknown state 99"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["explore"][..],
        &["reproduce", "corpus:cycles"],
        &["explore", "corpus:cycles", "--output", "pdf"],
        &["explore", "corpus:cycles", "--threshold", "1.5"],
        &["frobnicate"],
    ] {
        let run = uiwalk(args);
        assert_eq!(run.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&run.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn corpus_lists_bundled_apps() {
    let run = uiwalk(&["corpus"]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.contains("corpus:newsreader"));
}

#[test]
fn explore_accepts_spec_files() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("app.json");
    std::fs::write(&spec, uiwalk_core::sim::corpus::source("profile").unwrap()).unwrap();
    let out = dir.path().join("out");
    let run = uiwalk(&["explore", spec.to_str().unwrap(), "--out-dir", out.to_str().unwrap()]);
    assert!(run.status.success());
    assert_eq!(json(&run.stdout)["states"], 8);
}
