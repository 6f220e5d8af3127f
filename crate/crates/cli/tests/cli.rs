use std::path::{Path, PathBuf};
use std::process::Command;

use vortex_cli::config::RunConfig;
use vortex_cli::figure::check_regime;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vortex"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

#[test]
fn checked_in_configs_match_their_figures() {
    for n in 1..=4u8 {
        let cfg = RunConfig::load(&configs().join(format!("fig{n}.json"))).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.figure, Some(n));
        check_regime(&cfg, n).unwrap();
    }
}

#[test]
fn sweep_then_figure() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = bin()
        .args([
            "sweep",
            "--model",
            "scalar",
            "--grid-n",
            "4",
            "--eps-stop",
            "0.03",
            "--eps-step",
            "0.01",
            "--emit",
            "csv,json",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    for f in ["branch.csv", "comparison.csv", "hh_events.json", "manifest.json", "states/eps_0.030000.json"] {
        assert!(out.join(f).exists(), "{f}");
    }

    let fig = bin()
        .args(["figure", "--number", "1", "--grid-n", "4", "--eps-stop", "0.03"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(fig.status.success(), "{}", String::from_utf8_lossy(&fig.stderr));
    assert!(out.join("figure_1.svg").exists());

    // Figure 4 needs a Manakov run.
    let bad = bin()
        .args(["figure", "--number", "4", "--grid-n", "4", "--eps-stop", "0.03"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("configuration"));
}

#[test]
fn continue_prints_a_state() {
    let out = bin().args(["continue", "--grid-n", "3", "--eps", "0.02"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["epsilon"], serde_json::json!(0.02));
}

#[test]
fn predict_and_verify_emit_json() {
    let p = bin().args(["predict", "--eps-stop", "0.02", "--eps-step", "0.01"]).output().unwrap();
    assert!(p.status.success());
    let v: serde_json::Value = serde_json::from_slice(&p.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);

    let out = bin().args(["verify", "--only", "8"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["8.pass"], serde_json::json!(true));
    assert!(String::from_utf8_lossy(&out.stderr).contains("criterion  8 PASS"));
}

#[test]
fn bad_flags_fail() {
    assert!(!bin().args(["sweep", "--model", "spinor"]).status().unwrap().success());
    assert!(!bin().args(["sweep", "--eps-step", "0"]).status().unwrap().success());
}
