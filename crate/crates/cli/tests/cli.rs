//! End-to-end checks of the `swipt-re` binary: subcommands, file formats,
//! and exit codes (0 success, 2 config error, 3 non-convergence,
//! 4 infeasible).

use std::fs;
use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_swipt-re"))
}

fn write(path: &Path, body: &str) {
    fs::write(path, body).unwrap();
}

#[test]
fn run_preset_writes_csv_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "fig5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("separated.csv")).unwrap();
    assert!(csv.starts_with("energy,rate,converged\n"));
    assert!(csv.lines().count() > 50);
    let manifest = fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"corners\""));
    assert!(manifest.contains("\"q_max\""));
}

#[test]
fn run_with_physical_units_adds_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "fig4", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("separated.csv")).unwrap();
    assert!(csv.starts_with("energy,rate,converged,energy_mw,rate_mbps\n"));
}

#[test]
fn manifest_corners_are_ordered() {
    let dir = tempfile::tempdir().unwrap();
    assert!(bin()
        .args(["run", "fig6", "--out"])
        .arg(dir.path())
        .status()
        .unwrap()
        .success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap())
            .unwrap();
    let corners = &manifest["corners"];
    let (q_id, q_max) = (
        corners["q_id"].as_f64().unwrap(),
        corners["q_max"].as_f64().unwrap(),
    );
    let (r_eh, r_max) = (
        corners["r_eh"].as_f64().unwrap(),
        corners["r_max"].as_f64().unwrap(),
    );
    assert!(q_id <= q_max && r_eh <= r_max);
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    write(&config, r#"{"power": 1.0, "schemes": ["ts1"]}"#); // missing channel
    let out = bin()
        .args(["run"])
        .arg(&config)
        .args(["--out"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    // Diagnostics carry the parse location.
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));
}

#[test]
fn unknown_preset_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "fig99", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scheme_channel_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("cfg.json");
    // Separated channel but a co-located-only scheme.
    write(
        &config,
        r#"{
            "channel": {"kind": "rayleigh", "m": 2, "n_id": 2, "variance": 1.0, "seed": 1},
            "power": 1.0,
            "schemes": ["ups"]
        }"#,
    );
    let out = bin()
        .args(["run"])
        .arg(&config)
        .args(["--out"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_p3_reports_solution_json() {
    let dir = tempfile::tempdir().unwrap();
    let channel = dir.path().join("channel.json");
    write(
        &channel,
        r#"{"kind": "explicit", "h": [[[2.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]], "colocated": true}"#,
    );
    let out = bin()
        .args(["solve-p3", "--channel"])
        .arg(&channel)
        .args(["--power", "1.0", "--qbar", "3.8"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["converged"].as_bool().unwrap());
    assert!(report["harvested"].as_f64().unwrap() >= 3.8 - 1e-6);
    assert!(report["lambda"].as_f64().unwrap() > 0.0);
}

#[test]
fn solve_p3_infeasible_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let channel = dir.path().join("channel.json");
    write(
        &channel,
        r#"{"kind": "explicit", "h": [[[1.0, 0.0]]], "colocated": true}"#,
    );
    let out = bin()
        .args(["solve-p3", "--channel"])
        .arg(&channel)
        .args(["--power", "1.0", "--qbar", "5.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_channel_is_seed_deterministic() {
    let a = bin()
        .args(["gen-channel", "--m", "3", "--n", "2", "--var", "1.0", "--seed", "9"])
        .output()
        .unwrap();
    let b = bin()
        .args(["gen-channel", "--m", "3", "--n", "2", "--var", "1.0", "--seed", "9"])
        .output()
        .unwrap();
    let c = bin()
        .args(["gen-channel", "--m", "3", "--n", "2", "--var", "1.0", "--seed", "10"])
        .output()
        .unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let report: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(report["matrix"].as_array().unwrap().len(), 2); // n rows
}

#[test]
fn gen_channel_feeds_solve_p3() {
    let dir = tempfile::tempdir().unwrap();
    let matrix_file = dir.path().join("g.json");
    assert!(bin()
        .args(["gen-channel", "--m", "2", "--n", "2", "--var", "1.0", "--seed", "3", "--out"])
        .arg(&matrix_file)
        .status()
        .unwrap()
        .success());
    let generated: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&matrix_file).unwrap()).unwrap();
    let channel = dir.path().join("channel.json");
    write(
        &channel,
        &serde_json::json!({
            "kind": "explicit",
            "h": generated["matrix"],
            "colocated": true
        })
        .to_string(),
    );
    let out = bin()
        .args(["solve-p3", "--channel"])
        .arg(&channel)
        .args(["--power", "1.0", "--qbar", "0.0"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn thread_cap_env_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .env("SWIPT_RE_THREADS", "1")
        .args(["run", "fig5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    // Single-threaded output matches the default-pool output byte for byte.
    let dir2 = tempfile::tempdir().unwrap();
    assert!(bin()
        .env("SWIPT_RE_THREADS", "0")
        .args(["run", "fig5", "--out"])
        .arg(dir2.path())
        .status()
        .unwrap()
        .success());
    assert_eq!(
        fs::read(dir.path().join("separated.csv")).unwrap(),
        fs::read(dir2.path().join("separated.csv")).unwrap()
    );
}
