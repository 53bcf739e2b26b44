use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hypcircle")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_the_half_pi_preset() {
    let input = data("genus2_24_half_pi.json");
    let out = run(&["--command", "validate", "--input", arg(&input)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["command"], "validate");
    assert_eq!(report["schema_version"], 1);
}

#[test]
fn solve_then_develop_matches_the_combined_run() {
    let dir = tempfile::tempdir().unwrap();
    let (solved, split, combined, svg) =
        (dir.path().join("solve.json"), dir.path().join("dev.json"), dir.path().join("both.json"), dir.path().join("p.svg"));
    let input = data("genus2_24_mixed.json");
    let s = run(&["--command", "solve", "--strategy", "continuation", "--input", arg(&input), "--out", arg(&solved)]);
    assert_eq!(s.status.code(), Some(0), "{}", String::from_utf8_lossy(&s.stderr));
    let report = json(&solved);
    assert!(report["result"]["residual"].as_f64().unwrap() < 1e-10);

    let d = run(&["--command", "develop", "--input", arg(&solved), "--out", arg(&split), "--svg", arg(&svg)]);
    assert_eq!(d.status.code(), Some(0), "{}", String::from_utf8_lossy(&d.stderr));
    let split = json(&split);
    assert_eq!(split["from_solve_report"], true);
    assert!(split["verdict"]["max_angle_error"].as_f64().unwrap() < 1e-8);
    assert_eq!(split["verdict"]["passed"], true);
    let drawing = fs::read_to_string(&svg).unwrap();
    let copies = split["vertex_copies"].as_u64().unwrap() as usize;
    assert_eq!(drawing.matches("<circle class=\"vertex-circle\"").count(), copies);

    let c = run(&["--command", "develop", "--strategy", "continuation", "--input", arg(&input), "--out", arg(&combined)]);
    assert_eq!(c.status.code(), Some(0), "{}", String::from_utf8_lossy(&c.stderr));
    let combined = json(&combined);
    assert_eq!(combined["from_solve_report"], false);
    assert_eq!(split["verdict"], combined["verdict"]);
}

#[test]
fn malformed_input_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"schema_version\": 1, \"vertices\": ").unwrap();
    let (out, svg) = (dir.path().join("out.json"), dir.path().join("out.svg"));
    let r = run(&["--command", "develop", "--input", arg(&bad), "--out", arg(&out), "--svg", arg(&svg)]);
    assert_eq!(r.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&r.stderr).unwrap();
    assert_eq!(err["class"], "parse");
    assert!(r.stdout.is_empty());
    let left: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(left, vec![std::ffi::OsString::from("bad.json")]);
}

#[test]
fn missing_input_is_a_parse_error() {
    let r = run(&["--command", "solve"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let input = data("genus2_24_half_pi.json");
    let mut reports = Vec::new();
    let mut drawings = Vec::new();
    for i in 0..2 {
        let (out, svg) = (dir.path().join(format!("r{i}.json")), dir.path().join(format!("r{i}.svg")));
        let r = run(&["--command", "develop", "--seed", "7", "--input", arg(&input), "--out", arg(&out), "--svg", arg(&svg)]);
        assert_eq!(r.status.code(), Some(0));
        reports.push(fs::read(&out).unwrap());
        drawings.push(fs::read(&svg).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    assert_eq!(drawings[0], drawings[1]);
}

#[test]
fn selfcheck_passes() {
    let r = run(&["--command", "selfcheck", "--seed", "3"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stdout));
    let report: Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(report["seed"], 3);
}

#[test]
fn ideal_pipeline_runs_on_the_octagon() {
    let dir = tempfile::tempdir().unwrap();
    let (out, svg) = (dir.path().join("ideal.json"), dir.path().join("ideal.svg"));
    let input = data("octagon_genus2.json");
    let r = run(&["--command", "ideal", "--input", arg(&input), "--out", arg(&out), "--svg", arg(&svg)]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let report = json(&out);
    assert_eq!(report["result"]["star_radii_decreasing"], true);
    assert!(fs::read_to_string(&svg).unwrap().contains("vertex-circle"));
}

#[test]
fn validate_rejects_face_inadmissible_weights() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc = json(&data("genus2_24_half_pi.json"));
    let weights = doc["weights"].as_object_mut().expect("weights map");
    // face 0 has sides 9, 13 and 26: two near-pi angles against a small one
    for (edge, theta) in [("9", 3.0), ("13", 3.0), ("26", 0.1)] {
        weights.insert(edge.into(), Value::from(theta));
    }
    let path = dir.path().join("heavy.json");
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    let r = run(&["--command", "validate", "--input", arg(&path)]);
    assert_eq!(r.status.code(), Some(3));
    let solve = run(&["--command", "solve", "--input", arg(&path)]);
    assert_eq!(solve.status.code(), Some(3));
}
