use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn run(config: &str, extra: &[&str]) -> (i32, Option<Value>) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("config.json");
    std::fs::write(&path, config).unwrap();
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_hypmass"))
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(&out)
        .args(extra)
        .output()
        .unwrap()
        .status;
    let report = read_report(&out);
    (status.code().unwrap(), report)
}

fn read_report(out: &Path) -> Option<Value> {
    let text = std::fs::read_to_string(out.join("report.json")).ok()?;
    Some(serde_json::from_str(&text).unwrap())
}

#[test]
fn mass_on_the_model_space_is_zero() {
    let (code, report) = run(r#"{"command":"mass","metric":{"family":"hyperbolic","n":3}}"#, &[]);
    assert_eq!(code, 0);
    let p = report.unwrap()["results"]["mass_vector"]["p"].clone();
    assert_eq!(p, serde_json::json!([0.0, 0.0, 0.0, 0.0]));
}

#[test]
fn mass_on_sads_reports_the_unit_constant() {
    let (code, report) = run(r#"{"command":"mass","metric":{"family":"schwarzschild_ads","n":3,"params":{"m":0.5}}}"#, &[]);
    assert_eq!(code, 0);
    let p0 = report.unwrap()["results"]["mass_vector"]["p"][0].as_f64().unwrap();
    assert!((p0 - 8.0 * std::f64::consts::PI).abs() < 0.01 * 8.0 * std::f64::consts::PI);
}

#[test]
fn model_ode_has_unit_certificate() {
    let (code, report) = run(r#"{"command":"ode-verify"}"#, &[]);
    assert_eq!(code, 0);
    let c = report.unwrap()["results"]["certificate"].as_f64().unwrap();
    assert!((c - 1.0).abs() < 1e-6);
}

#[test]
fn schema_violations_exit_2() {
    assert_eq!(run(r#"{"command":"mass","metric":{"family":"hyperbolic","n":3},"bogus":1}"#, &[]).0, 2);
    assert_eq!(run(r#"{"command":"mass","metric":{"family":"hyperbolic","n":2}}"#, &[]).0, 2);
    assert_eq!(run(r#"{"command":"mass"}"#, &[]).0, 2);
    assert_eq!(run(r#"{"command":"mass","metric":{"family":"hyperbolic","n":3}}"#, &["--tol", "-1"]).0, 2);
}

#[test]
fn failed_checks_exit_1() {
    // an impossible tolerance on the mass extrapolation
    let (code, report) = run(
        r#"{"command":"mass","metric":{"family":"schwarzschild_ads","n":3,"params":{"m":0.5}},"numeric":{"tol":1e-14}}"#,
        &[],
    );
    assert_eq!(code, 1);
    let checks = report.unwrap()["checks"].as_array().unwrap().clone();
    assert!(checks.iter().any(|c| c["pass"] == Value::Bool(false)));
}

#[test]
fn report_records_config_version_and_seed() {
    let (_, report) = run(r#"{"command":"ode-verify","numeric":{"seed":9}}"#, &[]);
    let report = report.unwrap();
    assert_eq!(report["seed"], 9);
    assert!(report["version"].is_string());
    assert_eq!(report["config"]["numeric"]["horizon"], 20.0);
}
