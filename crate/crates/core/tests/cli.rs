use std::process::{Command, Output};

use serde_json::Value;

fn frontlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_frontlab")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn cbar_and_kstar_examples() {
    let v = json(&frontlab(&["cbar", "--n", "3", "--p", "3", "--q", "1", "--k", "2"]));
    assert!((v["value"].as_f64().unwrap() - 1.5).abs() < 1e-8);
    for key in ["bracket_lo", "bracket_hi", "tol", "evaluations"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let v = json(&frontlab(&["kstar", "--n", "3", "--p", "3", "--q", "1"]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-8);
}

#[test]
fn outputs_are_reproducible() {
    let args = ["classify", "--n", "3", "--p", "3", "--q", "1", "--k", "0.8", "--c", "-0.3"];
    let (a, b) = (frontlab(&args), frontlab(&args));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert!(v["connection"].is_string());
}

#[test]
fn exit_codes() {
    let bad = frontlab(&["cbar", "--n", "3", "--p", "1", "--q", "3", "--k", "2"]);
    assert_eq!(bad.status.code(), Some(2));
    let neg = frontlab(&["eigen", "--n", "3", "--p", "3", "--q", "1", "--k", "-1", "--c", "0"]);
    assert_eq!(neg.status.code(), Some(2));
    let missing = frontlab(&["cbar", "--n", "3"]);
    assert_eq!(missing.status.code(), Some(2));
    let grid = frontlab(&["simulate", "--n", "3", "--p", "3", "--q", "1", "--k", "2", "--L", "1"]);
    assert_eq!(grid.status.code(), Some(2));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, r#"{"command": "eigen", "n": 3, "p": 3, "q": 1, "k": 2, "c": -1}"#).unwrap();
    let v = json(&frontlab(&["--config", path.to_str().unwrap()]));
    assert_eq!(v["p2_class"], "StableNode");
    let v = json(&frontlab(&["--config", path.to_str().unwrap(), "--c", "10"]));
    assert_eq!(v["p2_class"], "UnstableNode");
}

#[test]
fn csv_outputs_round_trip() {
    let out = frontlab(&["verify-explicit"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("case_id,residual,sign_ok,shoot_deviation"));
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4, "{line}");
        if !cols[1].is_empty() {
            assert!(cols[1].parse::<f64>().unwrap() < 1e-10);
            assert!(cols[3].parse::<f64>().unwrap() < 1e-6);
        } else {
            assert_eq!(cols[2], "true");
        }
    }

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("profile.csv");
    let out = frontlab(&["profile", "--n", "3", "--p", "3", "--q", "1", "--k", "2", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert!(text.starts_with("xi,f\n"));
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 >= w[0].1));
}

#[test]
fn simulate_example() {
    let dir = tempfile::tempdir().unwrap();
    let out = frontlab(&[
        "simulate", "--n", "3", "--p", "3", "--q", "1", "--k", "0.5", "--ic", "heaviside", "--T", "40",
        "--out-dir", dir.path().to_str().unwrap(),
    ]);
    let v = json(&out);
    assert!(v["u_origin_final"].as_f64().unwrap() < 0.1);
    for key in ["params", "ic", "fitted_speed", "fit_residual", "shape_error_final"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    let saved: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(saved, v);
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(trace.starts_with("t,x_front\n"));
    let snaps = std::fs::read_to_string(dir.path().join("snapshots.csv")).unwrap();
    assert!(snaps.starts_with("t,x,u\n"));
}

#[test]
fn selfmap_reports_the_image() {
    let v = json(&frontlab(&["selfmap", "--n", "1", "--p", "2", "--q", "1", "--k", "2", "--n2", "2", "--check-kstar"]));
    assert_eq!(v["target"]["p"], 5.0);
    assert_eq!(v["target"]["q"], 3.0);
    assert!(v["kstar"]["invariant_gap"].as_f64().unwrap() < 5e-3);
}
