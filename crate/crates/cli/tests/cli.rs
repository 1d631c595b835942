//! End-to-end tests of the `cv-witness` binary: flag handling, exit codes,
//! file formats, and determinism.

use std::path::Path;
use std::process::{Command, Output};

use cv_witness::gaussian::CovarianceMatrix;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cv-witness"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn write_state(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name);
    let path_str = path.to_str().unwrap().to_string();
    let mut full: Vec<&str> = vec!["state"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["-o", &path_str]);
    let out = run(&full);
    assert!(
        out.status.success(),
        "state failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    path_str
}

#[test]
fn state_vacuum_and_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "vac.json", &["--family", "vacuum", "-N", "2"]);
    let text = std::fs::read_to_string(&path).unwrap();
    let v = CovarianceMatrix::from_json(&text).unwrap();
    assert_eq!(v.n_modes(), 2);
    for i in 0..4 {
        for j in 0..4 {
            let expected = if i == j { 0.25 } else { 0.0 };
            assert_eq!(v.entry(i, j), expected);
        }
    }
    // serialize -> parse -> serialize is bit-stable
    let second = CovarianceMatrix::from_json(&v.to_json()).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            assert_eq!(second.entry(i, j).to_bits(), v.entry(i, j).to_bits());
        }
    }
}

#[test]
fn state_network_matches_analytic() {
    let dir = tempfile::tempdir().unwrap();
    let ghz = ["--family", "ghz", "-N", "3", "--r1", "0.5", "--r2", "0.5"];
    let mut via_analytic = ghz.to_vec();
    via_analytic.extend_from_slice(&["--via", "analytic"]);
    let mut via_network = ghz.to_vec();
    via_network.extend_from_slice(&["--via", "network"]);
    let a = write_state(dir.path(), "a.json", &via_analytic);
    let b = write_state(dir.path(), "n.json", &via_network);
    let va = CovarianceMatrix::from_json(&std::fs::read_to_string(a).unwrap()).unwrap();
    let vb = CovarianceMatrix::from_json(&std::fs::read_to_string(b).unwrap()).unwrap();
    for i in 0..6 {
        for j in 0..6 {
            assert!((va.entry(i, j) - vb.entry(i, j)).abs() < 1e-10);
        }
    }
}

#[test]
fn state_usage_errors() {
    let out = run(&["state", "--family", "thermal", "-N", "2"]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "unknown family is a usage error"
    );
    let out = run(&["state", "--family", "ghz", "-N", "3", "--r1", "0.5"]);
    assert_eq!(out.status.code(), Some(2), "missing --r2 is a usage error");
}

#[test]
fn criteria_certifies_ghz() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(
        dir.path(),
        "ghz.json",
        &["--family", "ghz", "-N", "3", "--r1", "1", "--r2", "1"],
    );
    let json = stdout_json(&run(&["criteria", &path, "--gains", "optimal", "--json"]));
    assert_eq!(json["genuine"], true);
    assert_eq!(json["excluded"].as_array().unwrap().len(), 3);
    for c in json["conditions"].as_array().unwrap() {
        assert!(c["total_variance"].as_f64().unwrap() < 1.0);
    }
}

#[test]
fn criteria_on_vacuum_is_negative() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "vac3.json", &["--family", "vacuum", "-N", "3"]);
    let json = stdout_json(&run(&["criteria", &path, "--gains", "zero", "--json"]));
    assert_eq!(json["genuine"], false);
    for c in json["conditions"].as_array().unwrap() {
        assert_eq!(c["total_variance"].as_f64().unwrap(), 1.0);
    }
}

#[test]
fn criteria_single_combination_threshold() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "vac3.json", &["--family", "vacuum", "-N", "3"]);
    let w = format!("{}", std::f64::consts::FRAC_1_SQRT_2);
    let h = format!("1,-{w},-{w}");
    let g = format!("1,{w},{w}");
    let json = stdout_json(&run(&["criteria", &path, "--h", &h, "--g", &g, "--json"]));
    let threshold = json["genuine_threshold"].as_f64().unwrap();
    assert!((threshold - 0.5).abs() < 1e-12);
    assert_eq!(json["bounds"].as_array().unwrap().len(), 3);
    assert_eq!(json["genuine"], false);
}

#[test]
fn criteria_dimension_mismatch_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(dir.path(), "epr.json", &["--family", "epr", "--r", "1"]);
    let out = run(&["criteria", &path, "--h", "1,-1,0", "--g", "1,1,0", "--json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn classify_reports_classes_and_guards() {
    let dir = tempfile::tempdir().unwrap();
    let ghz = write_state(
        dir.path(),
        "ghz.json",
        &["--family", "ghz", "-N", "3", "--r1", "0.5", "--r2", "0.5"],
    );
    let json = stdout_json(&run(&["classify", &ghz, "--json"]));
    assert_eq!(json["class"], "Class1_FullyInseparable");

    let vac = write_state(dir.path(), "vac3.json", &["--family", "vacuum", "-N", "3"]);
    let json = stdout_json(&run(&["classify", &vac, "--json"]));
    assert_eq!(json["class"], "Class4or5_PPTAllCuts");

    let epr = write_state(dir.path(), "epr.json", &["--family", "epr", "--r", "1"]);
    let out = run(&["classify", &epr, "--json"]);
    assert_eq!(out.status.code(), Some(3), "two modes cannot be classified");
}

#[test]
fn sweep_is_ordered_and_boundary_exact() {
    let args = [
        "sweep", "--family", "unbiased", "-N", "5", "--r-max", "2", "--steps", "5", "--gain",
        "optimal",
    ];
    let out = run(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "r,r1,r2,gain,total_variance,genuine_threshold");
    assert_eq!(lines.len(), 6);
    let mut prev_r = f64::NEG_INFINITY;
    for row in &lines[1..] {
        let cols: Vec<f64> = row.split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cols.len(), 6);
        assert!(cols[0] > prev_r, "rows must be ordered by r ascending");
        prev_r = cols[0];
        assert_eq!(cols[5], 1.0);
    }
    let first: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(first[0], 0.0);
    assert!(
        (first[4] - 1.0).abs() < 1e-12,
        "the r=0 row sits on the boundary"
    );

    // deterministic output
    let again = run(&args);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn sweep_family_spellings_and_errors() {
    let kebab = run(&[
        "sweep",
        "--family",
        "equal-squeezers",
        "-N",
        "3",
        "--r-max",
        "1",
        "--steps",
        "2",
    ]);
    assert!(kebab.status.success());
    let snake = run(&[
        "sweep",
        "--family",
        "equal_squeezers",
        "-N",
        "3",
        "--r-max",
        "1",
        "--steps",
        "2",
    ]);
    assert_eq!(kebab.stdout, snake.stdout);

    let bad = run(&[
        "sweep", "--family", "thermal", "-N", "3", "--r-max", "1", "--steps", "2",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn simulate_certifies_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(
        dir.path(),
        "ghz.json",
        &["--family", "ghz", "-N", "3", "--r1", "1", "--r2", "1"],
    );
    let args = ["simulate", &path, "-n", "20000", "--seed", "7", "--json"];
    let out = run(&args);
    let json = stdout_json(&out);
    assert_eq!(json["genuine"], true);
    assert_eq!(json["rng"], "chacha12");
    assert_eq!(json["seed"], 7);
    assert_eq!(json["n_samples"], 20000);
    for c in json["conditions"].as_array().unwrap() {
        assert_eq!(c["verdict"], "violated");
    }

    let again = run(&args);
    assert_eq!(
        out.stdout, again.stdout,
        "same flags and seed must reproduce the report"
    );
}

#[test]
fn simulate_seed_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_state(
        dir.path(),
        "ghz.json",
        &["--family", "ghz", "-N", "3", "--r1", "0.5", "--r2", "0.5"],
    );
    let out = bin()
        .args(["simulate", &path, "-n", "5000", "--json"])
        .env("CV_WITNESS_SEED", "31337")
        .output()
        .unwrap();
    let json = stdout_json(&out);
    assert_eq!(json["seed"], 31337);
}

#[test]
fn simulate_rejects_unphysical_states_with_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let entries: Vec<String> = (0..36)
        .map(|i| {
            if i % 7 == 0 {
                "0.1".to_string()
            } else {
                "0.0".to_string()
            }
        })
        .collect();
    let text = format!(
        "{{\"n_modes\": 3, \"ordering\": \"x1p1...\", \"hbar_convention\": 0.5, \"entries\": [{}]}}",
        entries.join(",")
    );
    std::fs::write(&path, text).unwrap();
    let out = run(&["simulate", path.to_str().unwrap(), "-n", "1000", "--json"]);
    assert_eq!(out.status.code(), Some(4));
}
