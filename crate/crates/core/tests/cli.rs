use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lu_orbit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lu-orbit"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn generate(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(name).to_string_lossy().into_owned();
    let mut full = vec!["generate"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", &path]);
    let out = lu_orbit(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn w_state_amplitudes() {
    let out = lu_orbit(&["generate", "w", "--qubits", "3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["n"], 3);
    let amps = v["amplitudes"].as_array().unwrap();
    for (i, a) in amps.iter().enumerate() {
        let want = if [1, 2, 4].contains(&i) { 1.0 / 3f64.sqrt() } else { 0.0 };
        assert!((a[0].as_f64().unwrap() - want).abs() < 1e-15, "index {i}");
        assert_eq!(a[1].as_f64().unwrap(), 0.0);
    }
}

#[test]
fn random_generation_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(dir.path(), "a.json", &["random", "--qubits", "4", "--seed", "42"]);
    let b = generate(dir.path(), "b.json", &["random", "--qubits", "4", "--seed", "42"]);
    let c = generate(dir.path(), "c.json", &["random", "--qubits", "4", "--seed", "43"]);
    let read = |p: &str| std::fs::read(p).unwrap();
    assert_eq!(read(&a), read(&b));
    assert_ne!(read(&a), read(&c));
}

#[test]
fn malformed_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n\": 2, \"amplitudes\": [[1, 0]]").unwrap();
    let out = lu_orbit(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert_eq!(lu_orbit(&["analyze", "/nonexistent/state.json"]).status.code(), Some(2));
}

#[test]
fn analyze_reports() {
    let dir = tempfile::tempdir().unwrap();
    let ghz = generate(dir.path(), "ghz.json", &["ghz", "--qubits", "3"]);
    let v = stdout_json(&lu_orbit(&["analyze", &ghz]));
    assert_eq!(v["orbit_dimension"], 7);
    assert_eq!(v["rank"], 8);
    assert_eq!(v["is_minimal"], false);

    let zero = generate(dir.path(), "zero.json", &["basis", "--index", "0"]);
    let out = lu_orbit(&["analyze", "--backend", "exact", &zero]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["orbit_dimension"], 2);
    assert_eq!(v["is_minimal"], true);

    let float = generate(dir.path(), "float.json", &["basis", "--index", "01", "--mode", "float"]);
    assert_eq!(
        lu_orbit(&["analyze", "--backend", "exact", &float]).status.code(),
        Some(2)
    );
    assert_eq!(lu_orbit(&["analyze", "--tol", "2", &zero]).status.code(), Some(2));
}

#[test]
fn classify_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let canonical = generate(dir.path(), "p.json", &["singlet-product", "--pairs", "1:3,2:4"]);
    let scrambled = generate(
        dir.path(),
        "q.json",
        &["singlet-product", "--pairs", "1:3,2:4", "--lu-seed", "9"],
    );
    for file in [&canonical, &scrambled] {
        let out = lu_orbit(&["classify", file]);
        assert!(out.status.success());
        let v = stdout_json(&out);
        assert_eq!(v["pairs"], serde_json::json!([[1, 3], [2, 4]]));
        assert_eq!(v["lone"], Value::Null);
    }

    let w = generate(dir.path(), "w.json", &["w", "--qubits", "3"]);
    let out = lu_orbit(&["classify", &w]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["not_minimal"], true);
    assert_eq!(v["orbit_dimension"], 8);
}

#[test]
fn compare_pairings() {
    let dir = tempfile::tempdir().unwrap();
    let a = generate(
        dir.path(),
        "a.json",
        &["singlet-product", "--pairs", "1:2", "--lone", "3", "--lu-seed", "1"],
    );
    let b = generate(
        dir.path(),
        "b.json",
        &["singlet-product", "--pairs", "1:2", "--lone", "3", "--lu-seed", "2"],
    );
    let c = generate(
        dir.path(),
        "c.json",
        &["singlet-product", "--pairs", "2:3", "--lone", "1"],
    );
    let w = generate(dir.path(), "w.json", &["w", "--qubits", "3"]);

    let out = lu_orbit(&["compare", &a, &b]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["equal"], true);

    let out = lu_orbit(&["compare", &a, &c]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["equal"], false);

    assert_eq!(lu_orbit(&["compare", &a, &w]).status.code(), Some(1));
}

#[test]
fn verify_runs_and_rejects_unknown_suites() {
    let out = lu_orbit(&[
        "verify",
        "--suite",
        "pair_span_trichotomy",
        "--qubits",
        "3",
        "--trials",
        "10",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("PASS pair_span_trichotomy"), "{text}");

    let out = lu_orbit(&["verify", "--suite", "all", "--qubits", "3", "--trials", "5", "--json"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v.as_array().map(Vec::len), Some(12));

    assert_eq!(lu_orbit(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
}

#[test]
fn singlet_product_without_pairs_uses_seeded_pairing() {
    let run = |seed: &str| {
        stdout_json(&lu_orbit(&[
            "generate",
            "singlet-product",
            "--qubits",
            "5",
            "--seed",
            seed,
        ]))
    };
    assert_eq!(run("4"), run("4"));
    let dir = tempfile::tempdir().unwrap();
    let path = generate(
        dir.path(),
        "s.json",
        &["singlet-product", "--qubits", "5", "--seed", "4"],
    );
    let v = stdout_json(&lu_orbit(&["classify", &path]));
    assert_eq!(v["pairs"].as_array().unwrap().len(), 2);
    assert!(v["lone"].is_u64());
    assert_eq!(lu_orbit(&["generate", "singlet-product"]).status.code(), Some(2));
}

#[test]
fn matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let zero = generate(dir.path(), "zero.json", &["basis", "--index", "0"]);
    let out = lu_orbit(&["analyze", "--matrix", &zero]);
    assert!(out.status.success());
    // A|0> = i|0>, B|0> = -|1>, C|0> = i|1>, -i|0>
    let want = serde_json::json!([
        [["0", "1"], ["0", "0"]],
        [["0", "0"], ["-1", "0"]],
        [["0", "0"], ["0", "1"]],
        [["0", "-1"], ["0", "0"]]
    ]);
    assert_eq!(stdout_json(&out), want);
}
