use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn qot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qot")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn vacuum_self_distance() {
    let dir = tempfile::tempdir().unwrap();
    let o = qot(&["self", "--state", "vacuum", "--cutoff", "12", "--out", &out_arg(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let printed: Value = serde_json::from_slice(&o.stdout).unwrap();
    let v = printed["self_distance"].as_f64().unwrap();
    assert!((v - 1.0).abs() <= 1e-6);
    let doc = read_json(&dir.path().join("result.json"));
    assert_eq!(doc["command"], "self");
    assert_eq!(doc["result"], printed);
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn thermal_table_with_iteration_logs() {
    let dir = tempfile::tempdir().unwrap();
    let o = qot(&[
        "thermal",
        "--cutoff",
        "10",
        "--set",
        "nu_grid=[0.5]",
        "--set",
        "nu_prime_grid=[0.5, 1.0]",
        "--log-iterations",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(matches!(code(&o), 0 | 2), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&dir.path().join("result.json"));
    let rows = doc["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        assert!(r["solver_tolerance"].is_number() && r["truncation_bound"].is_number());
    }
    let logs = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().contains("iterations"))
        .count();
    assert!(logs >= 1);
}

#[test]
fn validation_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_arg(dir.path());
    assert_eq!(code(&qot(&["thermal", "--nu", "2", "--nu-prime", "1", "--no-sdp", "--out", &out])), 1);
    assert_eq!(code(&qot(&["self", "--set", "no_such_key=1", "--out", &out])), 1);
    assert_eq!(code(&qot(&["self", "--state", "squeezed:1", "--out", &out])), 1);
}

#[test]
fn truncation_budget_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = qot(&["self", "--state", "thermal:3", "--cutoff", "8", "--out", &out_arg(dir.path())]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn unconverged_solve_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = qot(&[
        "sdp",
        "--state",
        "thermal:1",
        "--target",
        "thermal:1.5",
        "--cutoff",
        "16",
        "--set",
        "admm.max_iter=5",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&dir.path().join("result.json"));
    assert_eq!(doc["result"]["solution"]["converged"], false);
}

fn strip_clock(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.retain(|k, _| !(k.contains("time") || k.contains("elapsed") || k.contains("seconds")));
            m.values_mut().for_each(strip_clock);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_clock),
        _ => {}
    }
}

#[test]
fn same_seed_same_result() {
    let run = |seed: &str| {
        let dir = tempfile::tempdir().unwrap();
        let o = qot(&["checks", "--suite", "smoke", "--seed", seed, "--jobs", "1", "--out", &out_arg(dir.path())]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let mut doc = read_json(&dir.path().join("result.json"));
        strip_clock(&mut doc);
        doc.as_object_mut().unwrap().remove("config");
        doc
    };
    let a = run("5");
    assert_eq!(a, run("5"));
    assert_ne!(a, run("6"));
}

#[test]
fn report_merges_and_flags_violations() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("merged");

    let o = qot(&["report", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let ok = json!([{"check_id": "triangle", "lhs": 1.0, "rhs": 2.0, "margin": 1.0, "tolerance": 1e-5, "pass": true, "metadata": {}}]);
    let bad = json!([{"check_id": "triangle", "lhs": 3.0, "rhs": 2.0, "margin": -1.0, "tolerance": 1e-5, "pass": false, "metadata": {}}]);
    let (p_ok, p_bad) = (dir.path().join("ok.json"), dir.path().join("bad.json"));
    std::fs::write(&p_ok, ok.to_string()).unwrap();
    std::fs::write(&p_bad, bad.to_string()).unwrap();

    let o = qot(&["report", p_ok.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = qot(&["report", p_ok.to_str().unwrap(), p_bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 4);
    let merged = read_json(&out.join("report.json"));
    assert_eq!(merged["tally"]["violations"], 1);
    assert!(out.join("report.csv").exists() && out.join("summary.txt").exists());

    let missing = dir.path().join("nope.json");
    assert_eq!(code(&qot(&["report", missing.to_str().unwrap(), "--out", out.to_str().unwrap()])), 1);
}
