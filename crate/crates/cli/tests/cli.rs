use std::fs;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let full: Vec<&str> = std::iter::once("codesw").chain(args.iter().copied()).collect();
    let code = codesw_cli::run(full, &mut out);
    (code, String::from_utf8(out).unwrap())
}

fn json(path: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn unknown_family_is_a_usage_error() {
    let (code, out) = run(&["sample", "--code", "hexagonal:3", "--out", "x"]);
    assert_eq!(code, 2);
    assert!(out.contains("unknown code family"), "{out}");
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn gen_writes_parseable_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out) = run(&["gen", "--code", "toric2d:3", "--out", d]);
    assert_eq!(code, 0, "{out}");
    for name in ["toric2d-L3-x.checks", "toric2d-L3-z.checks", "toric2d-L3.stab"] {
        assert!(dir.path().join(name).is_file(), "{name}");
    }
    // A generated file feeds back in through from-file.
    let checks = dir.path().join("toric2d-L3-x.checks");
    let (code, out) = run(&["certify", "--code", &format!("from-file:{}", checks.display()), "--graph", "cycle:9"]);
    assert_eq!(code, 0, "{out}");
    let stab = dir.path().join("toric2d-L3.stab");
    let (code, _) = run(&["gen", "--code", &format!("from-file:{}", stab.display()), "--out", d]);
    assert_eq!(code, 0);
    let (code, _) = run(&["gen", "--code", "ising-graph:complete:4", "--out", d]);
    assert_eq!(code, 0);
    assert!(dir.path().join("complete4.graph").is_file());
}

#[test]
fn verify_passes_and_catches_a_corrupted_kernel() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("v.json");
    let (code, out) = run(&[
        "verify",
        "--code",
        "ising-graph:cycle:4",
        "--graph",
        "cycle:4",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    assert_eq!(json(&report)["passed"], Value::Bool(true));

    let (code, out) = run(&[
        "verify",
        "--code",
        "ising-graph:complete:3",
        "--suite",
        "stationarity",
        "--fault",
        "inverted-metropolis",
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL metropolis-rc"), "{out}");
}

#[test]
fn certify_exit_codes() {
    assert_eq!(run(&["certify", "--code", "toric2d:2", "--graph", "cycle:4"]).0, 0);
    // Certified, but with a larger deficit than requested.
    let dir = tempfile::tempdir().unwrap();
    let mat = dir.path().join("d1.mat");
    fs::write(&mat, "3 2\n10\n10\n01\n").unwrap();
    let spec = format!("from-file:{}", mat.display());
    assert_eq!(run(&["certify", "--code", &spec, "--graph", "theta:3"]).0, 0);
    assert_eq!(run(&["certify", "--code", &spec, "--graph", "theta:3", "--delta", "0"]).0, 1);
    // Dependencies that do not embed.
    assert_eq!(run(&["certify", "--code", &spec, "--graph", "cycle:3"]).0, 1);
    // Edge count does not match the check count.
    assert_eq!(run(&["certify", "--code", "toric2d:2", "--graph", "complete:4"]).0, 2);
}

#[test]
fn sample_writes_traces_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("k3");
    let (code, out) = run(&[
        "sample",
        "--code",
        "ising-graph:complete:3",
        "--beta",
        "1.0",
        "--steps",
        "20000",
        "--replicas",
        "2",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    let csv = fs::read_to_string(dir.path().join("k3-r1.csv")).unwrap();
    assert!(csv.starts_with("step,energy,weight\n"));
    assert_eq!(csv.lines().count(), 20_001);
    let summary = json(&dir.path().join("k3.json"));
    let tv = summary["replicas"][0]["tv_to_exact"].as_f64().unwrap();
    assert!(tv < 0.03, "{tv}");
    assert_eq!(summary["consistency"]["passed"], Value::Bool(true));

    let (code, out) = run(&["sample", "--code", "toric2d:2", "--chain", "worm", "--out", "w"]);
    assert_eq!(code, 2, "{out}");
}

#[test]
fn quantum_modes() {
    let (code, out) = run(&["quantum", "--code", "bell"]);
    assert_eq!(code, 0, "{out}");
    let (code, out) = run(&["quantum", "--code", "bell", "--mode", "trajectory", "--beta", "0", "--steps", "40000"]);
    assert_eq!(code, 0, "{out}");
    // Exact mode refuses registers beyond the dense limit.
    assert_eq!(run(&["quantum", "--code", "toric2d:2"]).0, 2);
    assert_eq!(run(&["quantum", "--code", "ising-graph:cycle:3"]).0, 2);
}
