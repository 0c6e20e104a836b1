use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn rabi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rabi")).args(args).env_remove("RABI_WORKERS").output().unwrap()
}

fn config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn ground_two_level() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "two_level.cfg", "omega = 0.1\nOmega = 1\neps = 0.3\n");
    let out = rabi(&["ground", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("E/Omega = -0.5831"), "{text}");
    assert!(text.contains("sigma_z = 0.5145"), "{text}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(rabi(&["ground"]).status.code(), Some(2));
    assert_eq!(rabi(&["ground", "--config", "/nonexistent/x.cfg"]).status.code(), Some(2));
    let bad = config(dir.path(), "bad.cfg", "g2 = 1e-4:log\n");
    let out = rabi(&["ground", "--config", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 1"));
    let wrong_axes = config(dir.path(), "axes.cfg", "axis.g1 = 0:1:20\n");
    assert_eq!(rabi(&["ground", "--config", &wrong_axes]).status.code(), Some(2));
    assert_eq!(rabi(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn failure_budget_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "unbounded.cfg", "omega = 0.5\naxis.g2 = 0.5:1.5:5\n");
    assert_eq!(rabi(&["diagram", "--config", &cfg, "--workers", "2"]).status.code(), Some(3));
}

#[test]
fn diagram_output_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "grid.cfg", "omega = 0.1\neps = 0.001\naxis.g1 = 0:2:9\naxis.g2 = -0.5:0.5:5\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, w) in [(&a, "1"), (&b, "4")] {
        let o = rabi(&["diagram", "--config", &cfg, "--out", out.to_str().unwrap(), "--workers", w]);
        assert_eq!(o.status.code(), Some(0));
    }
    let (ca, cb) = (fs::read(a.join("diagram.csv")).unwrap(), fs::read(b.join("diagram.csv")).unwrap());
    assert_eq!(ca, cb);
    assert_eq!(String::from_utf8(ca).unwrap().lines().count(), 1 + 45);
    let side: serde_json::Value = serde_json::from_slice(&fs::read(a.join("diagram.json")).unwrap()).unwrap();
    assert_eq!(side["config"]["workers"], 1);
    assert_eq!(side["data"]["bands"]["center"], 0.25);
}

#[test]
fn boundary_with_analytic_overlay() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "dome.cfg", "omega = 0.01\naxis.g1 = 0.3:1.2:46\naxis.g2 = 0.5:0.6:2\n");
    let out = dir.path().join("o");
    let o = rabi(&["boundary", "--analytic", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let side: serde_json::Value = serde_json::from_slice(&fs::read(out.join("boundary.json")).unwrap()).unwrap();
    let overlay = side["data"]["overlay"].as_array().unwrap();
    assert_eq!(overlay.len(), 2);
    let round = overlay[1]["values"].as_array().unwrap().iter().find(|v| v["kind"] == "round").unwrap();
    assert!((round["value"].as_f64().unwrap() - 0.8).abs() < 1e-12);
    let detected = side["data"]["curves"][0]["points"][1]["transition"]["location"].as_f64().unwrap();
    assert!((detected / 0.8 - 1.0).abs() < 0.02);
    let csv = fs::read_to_string(out.join("boundary.csv")).unwrap();
    assert!(csv.starts_with("curve,g2,g1,order,signal,delta_sigma_z,refined,broken\n"));
}

#[test]
fn verify_parity_suite_passes() {
    let out = rabi(&["verify", "--suite", "parity"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}

#[test]
fn semiclassical_writes_landscape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "sc.cfg", "omega = 0.01\ng1 = 1.5\npoints = 501\n");
    let out = dir.path().join("o");
    assert_eq!(rabi(&["semiclassical", "--config", &cfg, "--out", out.to_str().unwrap()]).status.code(), Some(0));
    let csv = fs::read_to_string(out.join("semiclassical.csv")).unwrap();
    assert_eq!(csv.lines().count(), 502);
    let side: serde_json::Value = serde_json::from_slice(&fs::read(out.join("semiclassical.json")).unwrap()).unwrap();
    let minima = side["data"]["stationary_points"].as_array().unwrap().iter().filter(|s| s["kind"] == "minimum").count();
    assert_eq!(minima, 2);
}
