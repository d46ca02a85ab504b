//! End-to-end tests of the `mermin` binary: log schemas, manifests,
//! exit codes, and reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mermin(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mermin"))
        .args(args)
        .current_dir(dir)
        .env_remove("MERMIN_SEED")
        .output()
        .expect("failed to launch mermin")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no exit code")
}

#[test]
fn simulate_is_reproducible_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = mermin(
            &[
                "simulate", "--state", "phi-plus", "--policy", "device", "--trials", "2000",
                "--seed", "7", "--out", name,
            ],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
        fs::read(dir.path().join(name)).unwrap()
    };
    let first = run("a.jsonl");
    let second = run("b.jsonl");
    assert_eq!(first, second);

    let manifest: Value =
        serde_json::from_slice(&fs::read(dir.path().join("a.jsonl.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["model"], "quantum");
    assert_eq!(manifest["state"], "phi-plus");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["trials"], 2000);
}

#[test]
fn jsonl_schema_distinguishes_device_and_angle_settings() {
    let dir = tempfile::tempdir().unwrap();
    let out = mermin(
        &[
            "simulate", "--state", "psi-minus", "--policy", "fixed", "--alpha", "0", "--beta",
            "60", "--trials", "5", "--seed", "1", "--out", "fixed.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("fixed.jsonl")).unwrap();
    let line = text.lines().next().unwrap();
    let first: Value = serde_json::from_str(line).unwrap();
    let mut keys: Vec<&str> = first.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["alice_outcome", "alice_setting", "bob_outcome", "bob_setting", "index"]
    );
    assert!(line.starts_with("{\"index\":0,"), "line: {line}");
    // Fixed-policy settings are degrees and keep a decimal point.
    assert!(line.contains("\"alice_setting\":0.0"), "line: {line}");
    assert!((first["bob_setting"].as_f64().unwrap() - 60.0).abs() < 1e-9);
    assert!(first["bob_setting"].is_f64() && !first["bob_setting"].is_i64());

    let out = mermin(
        &[
            "classical", "--dist", "uniform", "--trials", "5", "--seed", "1", "--out",
            "dev.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("dev.jsonl")).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    let setting = first["alice_setting"].as_i64().unwrap();
    assert!((1..=3).contains(&setting));
}

#[test]
fn csv_log_round_trips_through_conserve() {
    let dir = tempfile::tempdir().unwrap();
    let out = mermin(
        &[
            "simulate", "--state", "phi-plus", "--policy", "fixed", "--alpha", "0", "--beta",
            "60", "--trials", "50000", "--seed", "3", "--format", "csv", "--out", "run.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.path().join("run.csv")).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "index,alice_setting,bob_setting,alice_outcome,bob_outcome"
    );

    let out = mermin(
        &["conserve", "--in", "run.csv", "--state", "phi-plus"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("conservation verdict:      pass"), "stdout: {stdout}");
    assert!(stdout.contains("reconstruction identity:   exact"));
}

#[test]
fn conserve_fails_on_uniform_classical_log() {
    let dir = tempfile::tempdir().unwrap();
    let out = mermin(
        &[
            "classical", "--dist", "uniform", "--trials", "30000", "--seed", "5", "--out",
            "raffle.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let out = mermin(
        &[
            "conserve", "--in", "raffle.jsonl", "--state", "phi-plus", "--pair", "1,2",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 3, "stdout: {}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn rerun_reproduces_log_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let out = mermin(
        &[
            "classical", "--dist", "two-one", "--mode", "anticorrelated", "--trials", "3000",
            "--seed", "17", "--out", "orig.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let original = fs::read(dir.path().join("orig.jsonl")).unwrap();
    fs::remove_file(dir.path().join("orig.jsonl")).unwrap();

    let out = mermin(&["rerun", "--manifest", "orig.jsonl.manifest.json"], dir.path());
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(dir.path().join("orig.jsonl")).unwrap(), original);
}

#[test]
fn seed_env_var_matches_explicit_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mermin"))
        .args(["simulate", "--state", "psi-plus", "--trials", "1000", "--out", "env.jsonl"])
        .current_dir(dir.path())
        .env("MERMIN_SEED", "99")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    let out = mermin(
        &[
            "simulate", "--state", "psi-plus", "--trials", "1000", "--seed", "99", "--out",
            "flag.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert_eq!(
        fs::read(dir.path().join("env.jsonl")).unwrap(),
        fs::read(dir.path().join("flag.jsonl")).unwrap()
    );
}

#[test]
fn analytic_prints_exact_values() {
    let dir = tempfile::tempdir().unwrap();
    let out = mermin(
        &["analytic", "--state", "phi-plus", "--alpha", "0", "--beta", "120"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("correlation:  -0.500000000000"), "stdout: {stdout}");
    assert!(stdout.contains("(0.125000000000, 0.375000000000, 0.375000000000, 0.125000000000)"));
}

#[test]
fn invalid_input_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    // Unknown state name: rejected by clap.
    let out = mermin(
        &["simulate", "--state", "omega", "--trials", "10", "--out", "x.jsonl"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    // Non-unit direction: rejected by validation.
    let out = mermin(
        &[
            "analytic", "--state", "phi-plus", "--a-dir", "1,1,0", "--b-dir", "0,0,1",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    // Fixed policy without angles.
    let out = mermin(
        &[
            "simulate", "--state", "phi-plus", "--policy", "fixed", "--trials", "10", "--out",
            "y.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn missing_input_file_exits_with_code_1() {
    let dir = tempfile::tempdir().unwrap();
    let out = mermin(&["conserve", "--in", "nope.jsonl"], dir.path());
    assert_eq!(code(&out), 1);
}

#[test]
fn check_reports_all_passing() {
    let dir = tempfile::tempdir().unwrap();
    let out = mermin(&["check", "--json"], dir.path());
    assert_eq!(code(&out), 0);
    let results: Vec<Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert!(results.len() >= 20);
    assert!(results.iter().all(|r| r["passed"] == true));
}
