mod common;

use std::path::PathBuf;
use std::process::{Command, Output};

use common::corpus_path;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvegerm"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn corpus(name: &str) -> String {
    corpus_path(name).to_string_lossy().into_owned()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("curvegerm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn cusp_verifies_with_exit_zero() {
    let out = bin(&["verify", &corpus("cusp")]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("tjurina"));
    assert!(text.contains("exit code 0"));
}

#[test]
fn syntax_error_reports_position() {
    let out = bin(&["check", &corpus("syntax_error")]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":2:25: syntax error"), "{err}");
}

#[test]
fn bad_flag_is_usage_error() {
    let out = bin(&["check", &corpus("cusp"), "--trunc-max", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = bin(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ideal_not_vanishing_is_rejected() {
    let path = scratch(
        "wrong.germ",
        "n = 2\nbranch b1 (t): x1 = t^2, x2 = t^3\nideal: f = x2^2 - x1^3 + x1^4\n",
    );
    let out = bin(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn constant_branch_is_not_finite() {
    let out = bin(&["check", &corpus("constant"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["finiteness"], Value::Bool(false));
}

#[test]
fn coincident_branches_are_undetermined() {
    let out = bin(&["invariants", &corpus("coincident"), "--trunc-max", "64", "--format", "json"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["delta"]["status"], "undetermined");
}

#[test]
fn non_reduced_ideal_fails_checks() {
    let path = scratch(
        "flat_cusp.germ",
        "n = 3\nbranch b1 (t): x1 = t^2, x2 = t^3, x3 = 0\nideal: f1 = x3\nideal: f2 = x1*x2^2 - x1^4\n",
    );
    let out = bin(&["verify", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(4));
    let doc = json(&out);
    let failed = doc["checks"].as_array().unwrap().iter().any(|c| c["passed"] == false);
    assert!(failed);
}

#[test]
fn json_is_deterministic() {
    let a = bin(&["report", &corpus("tacnode"), "--format", "json"]);
    let b = bin(&["report", &corpus("tacnode"), "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn codim_stage_reports_ae_codimension() {
    let out = bin(&["codim", &corpus("e6"), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["ae_codim"]["value"], 3);
    assert_eq!(doc["le_codim"]["value"], 6);
    assert_eq!(doc["tjurina"]["value"], 6);
}

#[test]
fn quasihomogeneous_flag_is_accepted() {
    let out = bin(&["verify", &corpus("e6"), "--quasihomogeneous", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["quasihomogeneous"], true);
}
