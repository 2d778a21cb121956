use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use iotrans::actively_perturbed_coin;
use iotrans::process_model::disjoint_output_machine;
use serde_json::Value;
use tempfile::TempDir;

fn iotrans(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iotrans"))
        .args(args)
        .env_remove("IOTRANS_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

struct Fixture {
    _dir: TempDir,
    coin: String,
    coin_dup: String,
    disjoint: String,
    broken: String,
}

fn fixture() -> Fixture {
    let dir = tempfile::tempdir().unwrap();
    let coin = actively_perturbed_coin(0.25, 0.25).unwrap();
    let broken = coin.to_json().replacen("0.75", "0.7", 1);
    let path = |name: &str, text: &str| write(dir.path(), name, text).display().to_string();
    Fixture {
        coin: path("coin.json", &coin.to_json()),
        coin_dup: path(
            "coin_dup.json",
            &coin.with_duplicated_state(0).unwrap().to_json(),
        ),
        disjoint: path("disjoint.json", &disjoint_output_machine().to_json()),
        broken: path("broken.json", &broken),
        _dir: dir,
    }
}

#[test]
fn validate_accepts_and_rejects() {
    let f = fixture();
    let ok = iotrans(&["validate", &f.coin]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json(&ok)["valid"], true);

    let bad = iotrans(&["validate", "--spec", &f.broken]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json(&bad)["error"], "RowNotNormalized");
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(iotrans(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(iotrans(&["complexity"]).status.code(), Some(2));
    assert_eq!(iotrans(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_file_is_a_domain_error() {
    let out = iotrans(&["complexity", "--spec", "/nonexistent/spec.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "Parse");
}

#[test]
fn minimize_merges_the_duplicate() {
    let f = fixture();
    let out = json(&iotrans(&["minimize", "--spec", &f.coin_dup]));
    assert_eq!(out["original_states"], 3);
    assert_eq!(out["causal_states"], 2);
    assert_eq!(out["partition"][0], serde_json::json!(["s0", "s0'"]));
}

#[test]
fn complexities_of_the_coin() {
    let f = fixture();
    let c = json(&iotrans(&[
        "complexity",
        "--spec",
        &f.coin,
        "--iid",
        "0=0.3,1=0.7",
    ]));
    assert!((c["C_X"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(c["non_pathological"], true);

    let q = json(&iotrans(&["qcomplexity", "--spec", &f.coin]));
    assert!((q["Q_X"].as_f64().unwrap() - 0.543_564_443).abs() < 1e-6);

    let s = json(&iotrans(&[
        "structural",
        "--spec",
        &f.coin,
        "--which",
        "quantum",
        "--resolution",
        "8",
    ]));
    assert!((s["value_bits"].as_f64().unwrap() - 0.543_564_443).abs() < 1e-6);
    let argmax = s["argmax_distribution"].as_object().unwrap();
    let total: f64 = argmax.values().map(|v| v.as_f64().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn zero_probability_inputs_warn() {
    let f = fixture();
    let out = iotrans(&["complexity", "--spec", &f.coin, "--iid", "1=1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stderr.is_empty());
    let report = json(&out);
    assert!(report["warnings"][0]
        .as_str()
        .unwrap()
        .contains("never occur"));
    assert!((report["C_X"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let quiet = json(&iotrans(&[
        "complexity",
        "--spec",
        &f.coin,
        "--iid",
        "1=0.5,0=0.5",
    ]));
    assert!(quiet.get("warnings").is_none());
}

#[test]
fn reducible_machine_is_a_domain_error() {
    let f = fixture();
    let out = iotrans(&["complexity", "--spec", &f.disjoint]);
    // both states absorb, so no input makes the chain irreducible
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"], "ReducibleChain");
}

#[test]
fn inefficiency_and_discrimination() {
    let f = fixture();
    let ineff = json(&iotrans(&["inefficiency", "--spec", &f.coin]));
    assert_eq!(ineff["stepwise_inefficient"], true);
    assert_eq!(ineff["witness"], serde_json::json!(["s0", "s1"]));

    let coin = json(&iotrans(&[
        "discriminate",
        "--spec",
        &f.coin,
        "--pair",
        "s0,s1",
    ]));
    assert_eq!(coin["status"], "ConditionIIFails");

    let disjoint = json(&iotrans(&[
        "discriminate",
        "--spec",
        &f.disjoint,
        "--pair",
        "a,b",
        "--max-depth",
        "3",
    ]));
    assert_eq!(disjoint["status"], "Distinguished");
    assert_eq!(disjoint["depth"], 1);
    assert!((disjoint["trace_distance"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn simulate_is_seeded() {
    let f = fixture();
    let args = [
        "simulate",
        "--spec",
        &f.coin,
        "--init",
        "s0",
        "--inputs",
        "1,0,1,1",
        "--seed",
        "42",
        "--samples",
        "200",
    ];
    let a = json(&iotrans(&args));
    let b = json(&iotrans(&args));
    assert_eq!(a, b);
    assert_eq!(a["seed"], 42);
    assert!(a["min_fidelity"].as_f64().unwrap() > 1.0 - 1e-9);
    let total: f64 = a["frequencies"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_f64().unwrap())
        .sum();
    assert!((total - 1.0).abs() < 1e-12);

    let from_env = Command::new(env!("CARGO_BIN_EXE_iotrans"))
        .args([
            "simulate",
            "--spec",
            &f.coin,
            "--init",
            "s0",
            "--inputs",
            "1,0,1,1",
            "--samples",
            "200",
        ])
        .env("IOTRANS_SEED", "42")
        .output()
        .unwrap();
    assert_eq!(json(&from_env), a);
}

#[test]
fn verify_passes_for_the_coin() {
    let f = fixture();
    let out = iotrans(&["verify", "--spec", &f.coin, "--horizon", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    // 2 initial states x (2 + 4 + 8) words
    assert_eq!(report["words"].as_array().unwrap().len(), 28);
    assert!(report["max_trace_distance"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn sweep_writes_csv() {
    let out = iotrans(&["sweep", "--points", "3", "--resolution", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,q,c_bar,q_bar,overlap");
    assert_eq!(lines.len(), 10);
    let middle: Vec<f64> = lines[5].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(middle[..2], [0.25, 0.25]);
    assert!((middle[3] - 0.543_564_443_2).abs() < 1e-9);
    assert!((middle[4] - 0.75).abs() < 1e-11);

    let bad = iotrans(&["sweep", "--p-min", "0"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn dispatch_in_process() {
    let f = fixture();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = iotrans::cli::dispatch(
        ["iotrans", "complexity", "--spec", &f.coin],
        &mut out,
        &mut err,
    );
    assert_eq!(code, 0);
    assert!(err.is_empty());
    let v: Value = serde_json::from_slice(&out).unwrap();
    assert!(v["C_X"].is_number());
}
