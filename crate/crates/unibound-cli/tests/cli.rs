//! CLI behavior: exit-code contract, flag validation, JSON round trips.

use std::io::Write;
use std::process::{Command, Output};

fn unibound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unibound"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_temp(content: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(content.as_bytes()).unwrap();
    f
}

const EXAMPLE1: &str = r#"{"type":"discrete","points":[-1,0,1],"probs":[0.2,0.5,0.3]}"#;

#[test]
fn bound_unimodal_example() {
    let out = unibound(&["bound", "--shape", "unimodal", "--mean", "0.1", "--mode", "0", "--r", "1"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("0.00333333"), "stdout: {}", stdout(&out));
}

#[test]
fn bound_lattice_example() {
    let out = unibound(&["bound", "--shape", "lattice", "--mean", "0.1", "--mode", "0"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("0.0366667"));
}

#[test]
fn bound_discrete_window_example() {
    let out = unibound(&[
        "bound", "--shape", "discrete-window", "--xlo", "0", "--xhi", "1", "--mean", "0.1",
        "--r", "1",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("0.0900000"));
}

#[test]
fn bound_mean_out_of_range_is_usage_error() {
    let out = unibound(&["bound", "--shape", "non-increasing", "--a", "0", "--b", "1", "--mean", "0.9"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("[0, 0.5]"), "stderr should name the violated range: {err}");
}

#[test]
fn bound_missing_flag_is_usage_error() {
    let out = unibound(&["bound", "--shape", "unimodal", "--mean", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--mode"));
}

#[test]
fn bound_lattice_rejects_fractional_mode() {
    let out = unibound(&["bound", "--shape", "lattice", "--mean", "0.1", "--mode", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bound_which_bound_filters() {
    let out = unibound(&[
        "bound", "--shape", "non-increasing", "--a", "0", "--b", "1", "--mean", "0.25",
        "--which-bound", "Jacobson",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("Jacobson"));
    assert!(!text.contains("Eq 2.4"));
}

#[test]
fn bound_json_output_parses() {
    let out = unibound(&[
        "bound", "--shape", "unimodal", "--mean", "0.1", "--mode", "0", "--format", "json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let bounds = v["bounds"].as_array().unwrap();
    let eq216 = bounds
        .iter()
        .find(|b| b["source"] == "Thm2.2-eq2.16")
        .expect("variance bound present");
    assert!((eq216["value"].as_f64().unwrap() - 0.01 / 3.0).abs() < 1e-15);
}

#[test]
fn audit_example1_passes() {
    let f = write_temp(EXAMPLE1);
    let out = unibound(&["audit", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("variance 0.490000"), "{text}");
    assert!(text.contains("0.0366667"));
    assert!(text.contains("0.0900000"));
    assert!(text.contains("result: PASS"));
}

#[test]
fn audit_echoed_distribution_round_trips() {
    let f = write_temp(EXAMPLE1);
    let out = unibound(&["audit", f.path().to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let echoed = serde_json::to_string(&v["distribution"]).unwrap();
    let original = unibound::parse_distribution(EXAMPLE1).unwrap();
    let reparsed = unibound::parse_distribution(&echoed).unwrap();
    assert_eq!(original, reparsed);
}

#[test]
fn audit_point_mass_passes() {
    let f = write_temp(r#"{"type":"discrete","points":[2],"probs":[1]}"#);
    let out = unibound(&["audit", f.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
}

#[test]
fn audit_rejects_bad_mass() {
    let f = write_temp(r#"{"type":"discrete","points":[0,1],"probs":[0.5,0.4]}"#);
    let out = unibound(&["audit", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("mass"));
}

#[test]
fn audit_rejects_malformed_json() {
    let f = write_temp("{nonsense");
    let out = unibound(&["audit", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn audit_rejects_missing_file() {
    let out = unibound(&["audit", "/nonexistent/path.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn audit_not_unimodal_skips_shape_bounds() {
    let f = write_temp(
        r#"{"type":"piecewise","breakpoints":[0,1,2,3],"heights":[0.45,0.1,0.45]}"#,
    );
    let out = unibound(&["audit", f.path().to_str().unwrap()]);
    assert!(out.status.success(), "not-unimodal input still audits: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("not unimodal"));
    assert!(text.contains("not applicable"));
}

#[test]
fn verify_zero_trials_is_usage_error() {
    let out = unibound(&["verify", "--trials", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_repeated_runs_are_identical() {
    let args = ["verify", "--seed", "5", "--trials", "40", "--format", "json"];
    let a = unibound(&args);
    let b = unibound(&args);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn verify_rejects_bad_thread_env() {
    let out = Command::new(env!("CARGO_BIN_EXE_unibound"))
        .args(["verify", "--trials", "10"])
        .env("UNIBOUND_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("UNIBOUND_THREADS"));
}

#[test]
fn compare_outputs_example1_reference() {
    let out = unibound(&["compare", "--seed", "3", "--trials", "25", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let ratio = v["example1"]["ratio"].as_f64().unwrap();
    assert!((ratio - 27.0 / 11.0).abs() < 1e-12);
    let total = v["window_wins"].as_u64().unwrap()
        + v["lattice_wins"].as_u64().unwrap()
        + v["ties"].as_u64().unwrap();
    assert_eq!(total, 25);
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = unibound(&["bound", "--shape", "unimodal", "--mean", "0.1", "--mode", "0", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}
