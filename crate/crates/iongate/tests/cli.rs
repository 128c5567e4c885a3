// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iongate"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("IONGATE_OUT")
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&read(path)).unwrap()
}

#[test]
fn budget_writes_table_summary_and_manifest() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["budget"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = read(&dir.path().join("budget.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("channel,error"));
    let total: f64 = csv.lines().find(|l| l.starts_with("total,")).unwrap()[6..].parse().unwrap();
    assert!((total - 0.9e-3).abs() <= 0.1e-3, "{total}");
    let summary = json(&dir.path().join("budget-summary.json"));
    for key in ["config_hash", "seed", "outputs", "versions"] {
        assert!(summary.get(key).is_some(), "{key}");
    }
    let manifest = json(&dir.path().join("budget-manifest.json"));
    assert_eq!(manifest["subcommand"], "budget");
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert_eq!(manifest["config_hash"], summary["config_hash"]);
}

#[test]
fn spinecho_peak_in_range() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["spinecho", "--t-min", "150e-6", "--t-max", "260e-6", "--points", "111"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = json(&dir.path().join("spinecho-summary.json"));
    let e = s["outputs"]["max_epsilon_se"].as_f64().unwrap();
    assert!((e - 1.8e-3).abs() <= 0.18e-3, "{e}");
    let rows = read(&dir.path().join("spinecho.csv")).lines().count();
    assert_eq!(rows, 112);
}

#[test]
fn json_format_wraps_table_in_envelope() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["--format", "json", "multigate"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&dir.path().join("multigate.json"));
    assert!(v["outputs"]["table"]["columns"].is_array());
    assert!(v["outputs"]["summary"]["predicted_quadratic"].as_f64().unwrap() > 0.0);
}

#[test]
fn reruns_are_byte_identical() {
    for args in [&["bias-study", "--datasets", "20", "--seed", "9"][..], &["rbm", "--seed", "3"][..]] {
        let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
        assert_eq!(run(a.path(), args).status.code(), Some(0));
        assert_eq!(run(b.path(), &[args, &["--jobs", "1"]].concat()).status.code(), Some(0));
        let name = args[0];
        for file in [format!("{name}.csv"), format!("{name}-summary.json")] {
            assert_eq!(read(&a.path().join(&file)), read(&b.path().join(&file)), "{file}");
        }
    }
}

#[test]
fn validate_passes_and_repeats() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    let oa = run(a.path(), &["validate", "--seed", "1"]);
    assert_eq!(oa.status.code(), Some(0), "{}", String::from_utf8_lossy(&oa.stdout));
    assert_eq!(run(b.path(), &["validate", "--seed", "1"]).status.code(), Some(0));
    assert_eq!(read(&a.path().join("validate.csv")), read(&b.path().join("validate.csv")));
}

#[test]
fn config_errors_exit_two_with_diagnostics() {
    let dir = TempDir::new().unwrap();
    let o = run(dir.path(), &["--profile", "no-such-profile", "budget"]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_str(String::from_utf8_lossy(&o.stderr).trim()).unwrap();
    assert!(err["messages"][0].as_str().unwrap().contains("no-such-profile"));

    let cfg = dir.path().join("bad.toml");
    let mut text = iongate::config::builtin_profile("table1-100us").unwrap().to_toml().unwrap();
    text = text.replacen("heating_rate = 2.2", "heating_rate = -2.2", 1);
    std::fs::write(&cfg, text).unwrap();
    let o = run(dir.path(), &["--config", cfg.to_str().unwrap(), "budget"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("noise.heating_rate"));
}

#[test]
fn out_dir_from_environment() {
    let dir = TempDir::new().unwrap();
    let o =
        Command::new(env!("CARGO_BIN_EXE_iongate")).arg("multigate").env("IONGATE_OUT", dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("multigate.csv").exists());
}
