//! End-to-end runs of the `hlgt` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn hlgt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hlgt")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

#[test]
fn predict_reports_z2_constants() {
    let out = hlgt(&["predict", "--beta", "inf", "--kappa", "1.7", "--supp", "24", "--edge-corr", "0.9"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["beta"], "inf");
    assert_eq!(v["assumption_a"], true);
    let t = v["assumption_a_threshold"].as_f64().unwrap();
    assert!((t - 1.6186653524).abs() < 1e-8);
    assert!(v["theta_prime"].as_f64().unwrap() > 0.0);
}

#[test]
fn predict_reports_divergent_constants_as_text() {
    let v = json(&hlgt(&["predict", "--kappa", "1.0"]));
    assert_eq!(v["assumption_a"], false);
    assert!(v["k"].as_str().unwrap().contains("diverges"));
}

#[test]
fn oracle_on_the_seven_edge_box() {
    let out = hlgt(&["oracle", "--lattice", "seven", "--beta", "0.5", "--kappa", "1.0"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["edges"], 7);
    assert_eq!(v["path_edges"], 2);
    let line = v["line"]["re"].as_f64().unwrap();
    assert!(line > 0.0 && line < 1.0);
    assert!(v["line"]["im"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn property_command_passes() {
    let out = hlgt(&["proptest", "--cases", "8", "--seed", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 failures"));
}

#[test]
fn verify_runs_a_single_criterion() {
    let out = hlgt(&["verify", "--only", "9"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.starts_with("[PASS]  9 "));
}

#[test]
fn bad_arguments_exit_with_usage_or_error_codes() {
    assert_eq!(hlgt(&["predict", "--beta", "hot"]).status.code(), Some(2));
    assert_eq!(hlgt(&["sample", "--experiment", "missing"]).status.code(), Some(2));
    assert!(!hlgt(&["frobnicate"]).status.success());
}
