use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn presets() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../presets")
}

fn preset(name: &str) -> String {
    presets().join(name).to_str().unwrap().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fractaldim")).args(args).output().unwrap()
}

fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn moran_on_cantor_file() {
    let r = stdout_json(&["dim", "--moran", &preset("cantor.json")]);
    assert_eq!(r["mode"], "moran");
    assert!((r["dimension"].as_f64().unwrap() - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
    assert_eq!(r["osc_verified"], false);
    assert!(r["note"].as_str().unwrap().contains("upper bound"));
}

#[test]
fn moran_with_region_verifies_osc() {
    let r = stdout_json(&["dim", "--moran", &preset("koch.json"), "--region", &preset("koch_region.json")]);
    assert_eq!(r["osc_verified"], true);
    let r = stdout_json(&["dim", "--moran", &preset("overlap_demo.json"), "--region", &preset("cantor_region.json")]);
    assert_eq!(r["osc_verified"], false);
}

#[test]
fn gen_det_depth_two_has_four_points() {
    let out = run(&["gen", "--preset", "cantor", "--method", "det", "--depth", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cloud = fractaldim::io::read_cloud_csv(&text).unwrap();
    assert_eq!(cloud.len(), 4);
    assert_eq!(cloud.dim(), 1);
}

#[test]
fn gen_json_round_trips_the_ifs() {
    let out = run(&["gen", "--preset", "sierpinski", "--out", "json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let s = fractaldim::ContractionSystem::from_json(&text).unwrap();
    assert_eq!(s.content_hash(), fractaldim::catalog::sierpinski_ifs().content_hash());
}

#[test]
fn boxcount_on_cantor_level_file() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let series = dir.path().join("series.csv");
    let out = run(&["gen", "--preset", "cantor", "--method", "level", "--depth", "10", "-o", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let r = stdout_json(&[
        "dim",
        "--boxcount",
        csv.to_str().unwrap(),
        "--base",
        "3",
        "--levels",
        "1:8",
        "--series-csv",
        series.to_str().unwrap(),
    ]);
    assert!((r["fit"]["slope"].as_f64().unwrap() - 0.6309297535714574).abs() < 1e-9);
    assert!((r["fit"]["r2"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let s = fractaldim::io::read_series_csv(&std::fs::read_to_string(series).unwrap()).unwrap();
    assert_eq!(s.entries.iter().map(|e| e.count).collect::<Vec<_>>(), vec![2, 4, 8, 16, 32, 64, 128, 256]);
}

#[test]
fn profile_reports_crossover_and_no_crossing_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    run(&["gen", "--preset", "cantor", "--method", "level", "--depth", "10", "-o", csv.to_str().unwrap()]);
    let eps = 3f64.powi(-8).to_string();
    let r = stdout_json(&["profile", csv.to_str().unwrap(), "--epsilon", &eps, "--base", "3"]);
    assert!((r["crossover"].as_f64().unwrap() - 0.6309297535714574).abs() < 1e-3);
    assert_eq!(r["occupied_cells"], 256);

    let out = run(&["profile", csv.to_str().unwrap(), "--epsilon", &eps, "--base", "3", "--deltas", "1:1.5:6"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn osc_outputs() {
    let r = stdout_json(&["osc", "--preset", "cantor"]);
    assert_eq!(r["verdict"], "pass");
    assert_eq!(r["dimension_status"], "hausdorff_dimension");
    let r = stdout_json(&["osc", &preset("overlap_demo.json"), &preset("cantor_region.json")]);
    assert_eq!(r["verdict"], "fail");
    assert_eq!(r["dimension_status"], "upper_bound_only");
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"dim":1,"maps":[{"linear":[[1.5]],"offset":[0.0]}]}"#).unwrap();
    let out = run(&["dim", "--moran", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a contraction"));

    let out = run(&["dim", "--moran", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["gen", "--preset", "snowflake", "--method", "chaos"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_is_enforced() {
    let out = Command::new(env!("CARGO_BIN_EXE_fractaldim"))
        .args(["gen", "--preset", "sierpinski", "--depth", "12"])
        .env("FRACTALDIM_BUDGET", "1000")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("chaos game"));
}

#[test]
fn svg_has_unit_viewbox() {
    let out = run(&["gen", "--preset", "koch", "--method", "level", "--depth", "3", "--out", "svg"]);
    let svg = String::from_utf8(out.stdout).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    assert!(svg.contains("viewBox=\"0 0 1 1\""));
}
