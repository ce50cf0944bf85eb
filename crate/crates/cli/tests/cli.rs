// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qinfo-life")).args(args).output().expect("binary runs")
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn theory_writes_versioned_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["theory", "thm1-asymptotic", "--n-a", "5", "--n-b", "1", "--t-max", "2", "--out", arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("theory_thm1-asymptotic.csv")).unwrap();
    assert!(csv.starts_with("t,bits,valid,kind,format_version\n0,10.000000000000,true"));
    assert!(csv.contains("1,8.830074998558,"));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("theory_thm1-asymptotic.json")).unwrap()).unwrap();
    assert_eq!(json["format_version"], 1);
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(bin(&["theory", "thm9", "--n-a", "1", "--n-b", "1", "--out", arg(dir.path())]).status.code(), Some(2));
    assert_eq!(bin(&["simulate", "missing.toml", "--out", arg(dir.path())]).status.code(), Some(2));
    assert_eq!(bin(&["simulate"]).status.code(), Some(2));
}

#[test]
fn simulate_then_lifetime_with_seed_override() {
    let dir = tempfile::tempdir().unwrap();
    let spec = configs().join("conditioned_clifford.toml");
    let run = |seed: &str, out: &Path| {
        let o = bin(&["simulate", arg(&spec), "--out", arg(out), "--seed", seed]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out.join("conditioned_clifford.csv")).unwrap()
    };
    let (a, b, c) = (dir.path().join("a"), dir.path().join("b"), dir.path().join("c"));
    assert_eq!(run("5", &a), run("5", &b));
    assert_ne!(run("5", &a), run("6", &c));
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(a.join("conditioned_clifford.json")).unwrap()).unwrap();
    assert_eq!(sidecar["spec"]["seed"], 5);
    assert_eq!(sidecar["format_version"], 1);

    let lt = dir.path().join("lt");
    let o = bin(&["lifetime", arg(&a.join("conditioned_clifford.csv")), "--epsilon", "0.95", "--out", arg(&lt)]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(lt.join("lifetime.json")).unwrap()).unwrap();
    assert_eq!(json["status"], "crossed");
    assert!(json["tau"].as_f64().unwrap() > 0.0);
}

#[test]
fn spectrum_and_q2c_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin(&["spectrum", arg(&configs().join("channel_ising.toml")), "--out", arg(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 64);
    let o = bin(&["q2c", arg(&configs().join("q2c_brickwork.toml")), "--mode", "unconditioned", "--shots", "8", "--out", arg(dir.path())]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    assert!(dir.path().join("q2c_brickwork_q2c-unconditioned.csv").exists());
}

#[test]
fn suite_exit_status_tracks_acceptance() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.toml");
    std::fs::write(&good, "seed = 1\nacceptance = [\"AC10\"]\n").unwrap();
    let o = bin(&["suite", arg(&good), "--out", arg(&dir.path().join("g"))]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("AC10 PASS"));

    let bad = dir.path().join("bad.toml");
    let spec = configs().join("conditioned_clifford.toml");
    std::fs::write(
        &bad,
        format!(
            "[[experiments]]\nname = \"x\"\nspec_file = {:?}\ncompare = {{ kind = \"thm1-asymptotic\", params = {{ n_a = 2, n_b = 1 }} }}\n",
            spec
        ),
    )
    .unwrap();
    let o = bin(&["suite", arg(&bad), "--out", arg(&dir.path().join("b"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(dir.path().join("b/manifest.json").exists());
}
