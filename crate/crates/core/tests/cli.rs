use std::path::Path;
use std::process::{Command, Output};

fn floquet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floquet"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = floquet(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

#[test]
fn noiseless_pipeline_reports_no_failures() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--family", "standard", "--dims", "3,6", "--cycles", "2", "-o", "c.txt"]);
    ok(d, &["sample", "--circuit", "c.txt", "--shots", "200", "--seed", "1", "-o", "s.txt"]);
    let shots = std::fs::read_to_string(d.join("s.txt")).unwrap();
    assert_eq!(shots.lines().count(), 200);
    assert!(shots.lines().all(|l| !l.contains('1')));
    ok(d, &["gen", "--family", "standard", "--dims", "3,6", "--cycles", "2", "--p", "0.001", "-o", "n.txt"]);
    ok(d, &["dem", "--circuit", "n.txt", "-o", "d.txt"]);
    let out = ok(d, &["decode", "--dem", "d.txt", "--shots", "s.txt", "-o", "pred.txt"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("shots=200 failures=0"));
}

#[test]
fn binary_and_tableau_sampling() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["gen", "--family", "dynamic", "--d", "2", "--p", "0.01", "-o", "c.txt"]);
    ok(d, &["sample", "--circuit", "c.txt", "--shots", "64", "--format", "binary", "-o", "a.bin"]);
    ok(d, &["sample", "--circuit", "c.txt", "--shots", "64", "--engine", "tableau", "-o", "b.txt"]);
    ok(d, &["dem", "--circuit", "c.txt", "-o", "d.txt"]);
    ok(d, &["decode", "--dem", "d.txt", "--shots", "a.bin", "--format", "binary", "-o", "p.txt"]);
    assert_eq!(std::fs::read_to_string(d.join("b.txt")).unwrap().lines().count(), 64);
}

#[test]
fn distance_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(dir.path(), &["distance", "--family", "dynamic", "--d", "2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("spatial=2"), "{text}");
    assert!(text.contains("timelike=2"), "{text}");
}

#[test]
fn rates_then_plot() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &["analyze", "rates", "--family", "dynamic", "--d", "2", "--p", "0.01", "--shots", "500", "-o", "r.csv"],
    );
    let rates = std::fs::read_to_string(d.join("r.csv")).unwrap();
    assert_eq!(rates.lines().count(), 4);
    ok(d, &["analyze", "plot", "--points", "r.csv", "-o", "plot.csv"]);
    let plot = std::fs::read_to_string(d.join("plot.csv")).unwrap();
    assert!(plot.lines().nth(1).unwrap().starts_with("curve,dynamic,2,0.01,"));
}

#[test]
fn errors_are_json_with_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let out = floquet(d, &["gen", "--family", "standard", "--d", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "invalid_dimensions");
    assert!(err["message"].as_str().is_some());

    let out = floquet(d, &["dem", "--circuit", "missing.txt"]);
    assert_eq!(out.status.code(), Some(3));

    std::fs::write(d.join("r.csv"), "family,d,p,observable,shots,failures,rate,ci_low,ci_high\n").unwrap();
    let out = floquet(d, &["analyze", "threshold", "--points", "r.csv", "--family", "dynamic"]);
    assert_eq!(out.status.code(), Some(2));
}
