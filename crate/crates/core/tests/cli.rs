//! The `akc` binary: exit codes and output files.

use std::path::Path;
use std::process::{Command, Output};

fn akc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_akc")).args(args).arg("--out").arg(out).output().unwrap()
}

#[test]
fn verify_passes_and_fails_by_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let ok = akc(&["verify", "--space", "sl2c", "--suite", "anti-kaehler", "--samples", "1000", "--seed", "42"], &out);
    assert_eq!(ok.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    let strict = akc(&["verify", "--suite", "anti-kaehler", "--tol", "0", "--samples", "50"], &out);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn unknown_space_is_a_config_error_listing_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let r = akc(&["verify", "--space", "nosuch"], &out);
    assert_eq!(r.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&r.stderr);
    assert!(msg.contains("so31c") && msg.contains("sl2c"), "{msg}");
    assert!(!out.exists());
}

#[test]
fn every_suite_runs() {
    let dir = tempfile::tempdir().unwrap();
    for suite in ["exp-holomorphic", "polar", "dual", "metric-extension"] {
        let out = dir.path().join(format!("{suite}.csv"));
        let r = akc(&["verify", "--space", "so3c", "--suite", suite, "--samples", "5", "--seed", "1", "--format", "csv"], &out);
        assert_eq!(r.status.code(), Some(0), "{suite}: {}", String::from_utf8_lossy(&r.stderr));
        assert!(std::fs::read_to_string(&out).unwrap().starts_with("check,residual,tolerance,pass\n"));
    }
}

#[test]
fn focal_writes_both_reports_diff_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("focal");
    let r = akc(&["focal", "--space", "sl2c", "--orbit-w", "[0.7,0,0.2]", "--window", "3", "--grid", "8"], &out);
    assert_eq!(r.status.code(), Some(0));
    let diff: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("diff.json")).unwrap()).unwrap();
    assert!(diff["distance"].as_f64().unwrap() <= 1e-8);
    assert!(out.join("closed_form.json").exists() && out.join("argument_principle.json").exists());
    let plot = std::fs::read_to_string(out.join("abs_det_grid.csv")).unwrap();
    assert!(plot.starts_with("re,im,value\n"));
    assert_eq!(plot.lines().count(), 1 + 64);
}

#[test]
fn focal_on_empty_window_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("focal");
    let r = akc(&["focal", "--space", "sl2c", "--orbit-w", "[0.7,0,0.2]", "--window", "0.1"], &out);
    assert_eq!(r.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("argument_principle.json")).unwrap()).unwrap();
    assert_eq!(rep["radii"].as_array().unwrap().len(), 0);
}

#[test]
fn orbit_requirements_drive_the_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let r = akc(&["orbit", "--space", "sl2c", "--w", "0", "--samples", "2", "--seed", "1", "--require", "totally_geodesic"], &out);
    assert_eq!(r.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(v["flags"]["principal"], false);
    let r = akc(&["orbit", "--space", "sl2c", "--w", "0", "--samples", "2", "--seed", "1", "--require", "principal"], &out);
    assert_eq!(r.status.code(), Some(2));
    let r = akc(&["orbit", "--space", "sl2c", "--w", "[1,2,3,4]"], &out);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn regular_orbit_has_all_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let r = akc(
        &["orbit", "--space", "sl2c", "--w", "[1,0,0.3]", "--samples", "10", "--seed", "7", "--require",
          "flat_section,curvature_adapted,equifocal,isoparametric,principal,reflective_zero_section"],
        &out,
    );
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stdout));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"space": "so3c", "suite": "polar", "samples": 5, "seed": 3, "tol": 0}"#).unwrap();
    let out = dir.path().join("r.json");
    let r = akc(&["verify", "--config", cfg.to_str().unwrap(), "--tol", "1e-9"], &out);
    assert_eq!(r.status.code(), Some(0));
    let rep: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(rep["space"], "so3c");
    assert_eq!(rep["tolerance"], 1e-9);
}
