use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn stickel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stickel")).args(args).output().expect("binary runs")
}

fn write_config(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("stickel-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("artifact is JSON")
}

#[test]
fn places_lists_four_places_for_q2_n2() {
    let out = stickel(&["places", "--degree-cap", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let labels: Vec<&str> = v["places"].as_array().unwrap().iter().map(|p| p["place"].as_str().unwrap()).collect();
    assert_eq!(labels, ["inf", "t", "1+t", "1+t+t^2"]);
}

#[test]
fn stickelberger_trivial_tower() {
    let cfg = write_config("trivial.json", r#"{"q": 2, "k": 8}"#);
    let out = stickel(&["stickelberger", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["theta"], 255);
}

#[test]
fn malformed_descriptor_reports_pointer() {
    let cfg = write_config("bad.json", r#"{"q": 2, "descriptor": {"kind": "nope"}}"#);
    let out = stickel(&["theta", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["pointer"], "/descriptor/kind");
    let out = stickel(&["theta", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn checks_pass_on_bundled_configs() {
    for (cmd, file) in [
        ("check-interpolation", "interpolation.json"),
        ("check-functional-equation", "functional_equation.json"),
        ("check-descent", "descent.json"),
        ("check-twist-identity", "twist_identity.json"),
        ("char-ideal", "char_ideal.json"),
        ("split", "split.json"),
    ] {
        let out = stickel(&[cmd, "--config", config(file).to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn failing_check_exits_one() {
    let cfg = write_config(
        "wrong_alpha.json",
        r#"{"q": 2, "descriptor": {"kind": "tilde", "base": {"kind": "constant", "n": 2}, "h_order": 3}, "lambda": [17], "psi": [1], "alpha_inv": {"int": 17}, "k": 6, "N": 6}"#,
    );
    let out = stickel(&["check-twist-identity", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["pass"], false);
}

#[test]
fn artifacts_are_byte_identical_and_sorted() {
    let cfg = config("theta_plus.json");
    let args = ["plfun", "--config", cfg.to_str().unwrap(), "--jobs", "2"];
    let a = stickel(&args);
    let b = stickel(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let top: Vec<&str> = text.lines().filter(|l| l.starts_with("  \"")).collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("stickel-out-{}.json", std::process::id()));
    let out = stickel(&["places", "--degree-cap", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["counts"], serde_json::json!([3, 1, 2]));
}

#[test]
fn verify_suite_passes_with_seed() {
    let out = stickel(&["verify-suite", "--seed", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_of(&out);
    assert_eq!(v["criteria"].as_array().unwrap().len(), 12);
}
