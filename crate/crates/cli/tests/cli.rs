use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn fptcov(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fptcov")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

/// Two sets exactly meet the demand of 4; dropping either misses it.
const TIGHT: &str = r#"{"elements": 4, "colors": [1, 1, 1, 1], "sets": [[0, 1], [2, 3], [1]], "demands": ["4"], "k": 2}"#;

fn tight(dir: &TempDir) {
    fs::write(dir.path().join("tight.json"), TIGHT).unwrap();
}

#[test]
fn exact_solution_verifies() {
    let dir = TempDir::new().unwrap();
    tight(&dir);
    let o = fptcov(&["solve", "tight.json", "--algorithm", "exact", "--output", "sol.json", "--format", "json-lines"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(json_lines(&o)[0]["solution"], serde_json::json!([0, 1]));
    let v = fptcov(&["verify", "tight.json", "sol.json", "--epsilon", "0", "--format", "json-lines"], dir.path());
    assert_eq!(code(&v), 0);
    assert_eq!(json_lines(&v)[0]["success"], true);
}

#[test]
fn corrupted_solution_fails_verification() {
    let dir = TempDir::new().unwrap();
    tight(&dir);
    fs::write(dir.path().join("bad.json"), r#"{"solution": [0]}"#).unwrap();
    let v = fptcov(&["verify", "tight.json", "bad.json", "--epsilon", "1/10", "--format", "json-lines"], dir.path());
    assert_eq!(code(&v), 1);
    let r = &json_lines(&v)[0];
    assert_eq!(r["success"], false);
    assert_eq!(r["coverage"], serde_json::json!([2]));
}

#[test]
fn verify_checks_independence() {
    let dir = TempDir::new().unwrap();
    tight(&dir);
    fs::write(dir.path().join("sol.json"), r#"{"solution": [0, 1]}"#).unwrap();
    fs::write(dir.path().join("m.json"), r#"{"type": "partition", "blocks": [[0, 1]], "capacities": [1]}"#).unwrap();
    assert_eq!(code(&fptcov(&["verify", "tight.json", "sol.json"], dir.path())), 0);
    assert_eq!(code(&fptcov(&["verify", "tight.json", "sol.json", "--matroid", "m.json"], dir.path())), 1);
}

#[test]
fn matroid_constrained_solve_reports_no() {
    let dir = TempDir::new().unwrap();
    tight(&dir);
    fs::write(dir.path().join("m.json"), r#"{"type": "partition", "blocks": [[0, 1]], "capacities": [1]}"#).unwrap();
    let o = fptcov(&["solve", "tight.json", "--algorithm", "exact", "--matroid", "m.json", "--format", "json-lines"], dir.path());
    assert_eq!(code(&o), 1);
    let r = &json_lines(&o)[0];
    assert_eq!(r["outcome"], "no");
    assert_eq!(r["matroid"], "partition");
}

#[test]
fn bench_rows_are_instances_times_algorithms() {
    let dir = TempDir::new().unwrap();
    let o = fptcov(&["bench", "--instances", "20", "--n", "8", "--m", "10", "--algorithms", "freqd,exact", "--delimiter", ","], dir.path());
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 1 + 20 * 2);
    assert!(lines[0].starts_with("instance,algorithm,"));
    assert!(lines[1..].iter().all(|l| l.split(',').count() == lines[0].split(',').count()));
}

fn without_timing(o: &Output) -> Vec<Value> {
    json_lines(o)
        .into_iter()
        .map(|mut v| {
            v.as_object_mut().unwrap().remove("wall_ms");
            v
        })
        .collect()
}

#[test]
fn identical_invocations_identical_reports() {
    let dir = TempDir::new().unwrap();
    let args = ["bench", "--instances", "4", "--n", "8,9", "--algorithms", "freqd,kdd,exact", "--format", "json-lines", "--seed", "11"];
    let a = fptcov(&args, dir.path());
    let b = fptcov(&args, dir.path());
    assert_eq!(without_timing(&a), without_timing(&b));
    let c = fptcov(&["bench", "--instances", "4", "--n", "8,9", "--format", "json-lines", "--seed", "12"], dir.path());
    assert_ne!(without_timing(&a)[0]["seed"], without_timing(&c)[0]["seed"]);
}

#[test]
fn every_success_flag_is_recomputable() {
    let dir = TempDir::new().unwrap();
    fptcov(&["gen", "freq-d", "--n", "9", "--m", "12", "--d", "2", "--r", "2", "--k", "2", "--seed", "5", "--output", "g.json"], dir.path());
    for alg in [["--algorithm", "freqd"], ["--algorithm", "exact"]] {
        let mut args = vec!["solve", "g.json", "--epsilon", "3/10", "--output", "s.json", "--format", "json-lines"];
        args.extend(alg);
        let o = fptcov(&args, dir.path());
        let claimed = json_lines(&o)[0]["success"].clone();
        let v = fptcov(&["verify", "g.json", "s.json", "--format", "json-lines"], dir.path());
        assert_eq!(json_lines(&v)[0]["success"], claimed);
        assert_eq!(json_lines(&v)[0]["epsilon"], "3/10");
    }
}

#[test]
fn kdd_requires_d() {
    let dir = TempDir::new().unwrap();
    tight(&dir);
    assert_eq!(code(&fptcov(&["solve", "tight.json", "--algorithm", "kdd"], dir.path())), 64);
    let o = fptcov(&["solve", "tight.json", "--algorithm", "kdd", "--d", "2", "--strict-kdd"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(code(&fptcov(&["solve", "tight.json", "--derandomize"], dir.path())), 64);
}

#[test]
fn strict_check_rejects_biclique() {
    let dir = TempDir::new().unwrap();
    let doc = r#"{"elements": 2, "colors": [1, 1], "sets": [[0, 1], [0, 1]], "demands": ["2"], "k": 1}"#;
    fs::write(dir.path().join("k22.json"), doc).unwrap();
    let o = fptcov(&["solve", "k22.json", "--algorithm", "kdd", "--d", "2", "--strict-kdd"], dir.path());
    assert_eq!(code(&o), 65);
}

#[test]
fn usage_and_data_errors() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&fptcov(&["frobnicate"], dir.path())), 64);
    assert_eq!(code(&fptcov(&["solve", "missing.json"], dir.path())), 65);
    fs::write(dir.path().join("bad.cnf"), "p ccnf 2 1 1 1\nd 1 1\n1 2 -2 0\n").unwrap();
    let o = fptcov(&["reduce", "bad.cnf"], dir.path());
    assert_eq!(code(&o), 65);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3, column 5"));
    tight(&dir);
    assert_eq!(code(&fptcov(&["solve", "tight.json", "--epsilon", "1"], dir.path())), 64);
    assert_eq!(code(&fptcov(&["solve", "tight.json", "--trials", "0"], dir.path())), 64);
    assert_eq!(code(&fptcov(&["--help"], dir.path())), 0);
}

#[test]
fn trial_cap_exhaustion_exits_two() {
    let dir = TempDir::new().unwrap();
    // four singleton sets, demand 4 with budget 4: feasible, but one run rarely finds it
    let doc = r#"{"elements": 8, "colors": [1,1,1,1,1,1,1,1], "sets": [[0],[1],[2],[3],[4],[5],[6],[7]], "demands": ["8"], "k": 8}"#;
    fs::write(dir.path().join("s.json"), doc).unwrap();
    let o = fptcov(&["solve", "s.json", "--epsilon", "1/100", "--trial-cap", "0"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn cnf_reduce_and_exact() {
    let dir = TempDir::new().unwrap();
    let g = fptcov(&["gen", "cnf", "--n", "8", "--m", "10", "--d", "3", "--r", "1", "--k", "2", "--seed", "2", "--output", "f.cnf"], dir.path());
    assert_eq!(code(&g), 0);
    let e = fptcov(&["solve", "f.cnf", "--algorithm", "exact", "--output", "e.json", "--format", "json-lines"], dir.path());
    assert_eq!(code(&e), 0);
    assert_eq!(code(&fptcov(&["verify", "f.cnf", "e.json"], dir.path())), 0);
    let r = fptcov(&["reduce", "f.cnf", "--algorithm", "exact", "--seed", "3", "--output", "r.json", "--format", "json-lines"], dir.path());
    let rep = &json_lines(&r)[0];
    assert_eq!(rep["algorithm"], "reduce+exact");
    assert_eq!(rep["runs"], 64);
    let v = fptcov(&["verify", "f.cnf", "r.json", "--format", "json-lines"], dir.path());
    assert_eq!(json_lines(&v)[0]["success"], rep["success"]);
    assert_eq!(code(&r), if rep["success"] == true { 0 } else { 1 });
    assert_eq!(code(&fptcov(&["solve", "f.cnf"], dir.path())), 64);
}

#[test]
fn generated_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let args = ["gen", "kdd-free", "--n", "8", "--m", "10", "--d", "2", "--r", "2", "--k", "2", "--seed", "9"];
    let a = fptcov(&args, dir.path());
    let b = fptcov(&args, dir.path());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let doc: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(doc["sets"].as_array().unwrap().len(), 8);
}
