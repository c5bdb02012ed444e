//! The `bhl` binary end to end.

use std::path::Path;
use std::process::Command;

fn bhl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bhl"))
}

fn shipped_config() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json")
}

fn csv_count(dir: &Path) -> usize {
    std::fs::read_dir(dir)
        .unwrap()
        .filter(|e| e.as_ref().unwrap().path().extension().is_some_and(|x| x == "csv"))
        .count()
}

#[test]
fn version_prints() {
    let out = bhl().arg("version").output().unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("bhl "));
}

#[test]
fn zero_interaction_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"model": {"U": 0.0}}"#).unwrap();
    let out = bhl().args(["verify", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bhl().args(["scan", "--kind", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bhl().args(["verify", "--config"]).arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_config_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let out = bhl()
        .args(["verify", "--config"])
        .arg(shipped_config())
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(csv_count(dir.path()) >= 9);
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["passed"], true);
    assert_eq!(manifest["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["checks"].as_array().unwrap().len(), 10);
}

#[test]
fn flags_override_file_and_scans_run() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 1, "output": "ignored-dir"}"#).unwrap();
    let out_dir = dir.path().join("ksum");
    let out = bhl()
        .args(["scan", "--kind", "ksum", "--seed", "7", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let manifest: serde_json::Value =
        serde_json::from_slice(&std::fs::read(out_dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 7);
    let ksum = std::fs::read_to_string(out_dir.join("ksum.csv")).unwrap();
    assert_eq!(ksum.lines().count(), 6);

    let spec_dir = dir.path().join("spectrum");
    let out = bhl().args(["spectrum", "--cutoff", "3", "--out"]).arg(&spec_dir).output().unwrap();
    assert!(out.status.success());
    let spectrum = std::fs::read_to_string(spec_dir.join("spectrum.csv")).unwrap();
    // d = 1, N = 2, M = 3: C(5, 2) = 10 levels
    assert_eq!(spectrum.lines().count(), 11);
}
