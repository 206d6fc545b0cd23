//! End-to-end checks of the binary: file contracts, exit codes, and
//! reproducibility.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pcshape(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pcshape"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("reading {name}: {e}"))
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn mi_curve_reproduces_reference_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcshape(
        &["mi-curve", "--family", "qam", "--size", "16", "--bits", "5", "--shift-mult", "2", "--sigma", "1.0", "--out", "row.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(dir.path(), "row.csv");
    assert!(csv.starts_with("sigma,snr_db,mi_bits,estimator,param\n"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 1);
    let mi: f64 = rows[0][2].parse().unwrap();
    assert!((mi - 0.58168).abs() <= 2e-3, "mi = {mi}");
    assert_eq!(rows[0][3], "discrete");
    assert_eq!(rows[0][4], "uniform");
    assert!(dir.path().join("row.config.json").exists());
}

#[test]
fn sigma_grid_is_inclusive() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcshape(
        &["mi-curve", "--family", "pam", "--size", "2", "--estimator", "discrete", "--bits", "6", "--sigma", "0.1:1.5:0.1", "--out", "grid.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(data_rows(&read(dir.path(), "grid.csv")).len(), 15);
}

#[test]
fn unknown_family_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcshape(
        &["mi-curve", "--family", "hexagon", "--size", "7", "--sigma", "1.0", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_sigma_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcshape(
        &["mi-curve", "--family", "pam", "--size", "2", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_gain_range_exits_3_with_error_name() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcshape(
        &["optimize", "cba", "--family", "pam", "--size", "8", "--bits", "6", "--sigma", "0.5", "--alpha-range", "20:30", "--depth", "2", "--points-per-depth", "4", "--out", "x.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("AllGainsInfeasible"));
}

#[test]
fn mc_runs_are_byte_identical_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        let out = pcshape(
            &["mi-curve", "--family", "psk", "--size", "4", "--estimator", "mc", "--samples", "20000", "--seed", "11", "--sigma", "0.3:0.7:0.2", "--out", name],
            dir.path(),
        );
        assert!(out.status.success());
    }
    assert_eq!(read(dir.path(), "a.csv"), read(dir.path(), "b.csv"));
}

#[test]
fn zero_lambda_envelope_matches_uniform_curve() {
    let dir = tempfile::tempdir().unwrap();
    let ok = pcshape(
        &["optimize", "mb-envelope", "--family", "pam", "--size", "4", "--bits", "7", "--sigma", "0.2:0.8:0.3", "--lambdas", "0", "--out", "env.csv"],
        dir.path(),
    );
    assert!(ok.status.success());
    let ok = pcshape(
        &["mi-curve", "--family", "pam", "--size", "4", "--bits", "7", "--sigma", "0.2:0.8:0.3", "--out", "uni.csv"],
        dir.path(),
    );
    assert!(ok.status.success());
    let env = data_rows(&read(dir.path(), "env.csv"));
    let uni = data_rows(&read(dir.path(), "uni.csv"));
    assert_eq!(env.len(), uni.len());
    for (e, u) in env.iter().zip(&uni) {
        assert_eq!(e[2], u[2], "MI mismatch at sigma {}", e[0]);
    }
}

#[test]
fn ba_emits_distributions_and_rising_power() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcshape(
        &["optimize", "ba", "--family", "qam", "--size", "16", "--bits", "5", "--eps", "1e-7", "--sigma", "1.0", "--out", "ba.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let jsonl = read(dir.path(), "ba.dists.jsonl");
    let row: serde_json::Value = serde_json::from_str(jsonl.lines().next().unwrap()).unwrap();
    let probs = row["probabilities"].as_array().unwrap();
    assert_eq!(probs.len(), 16);
    assert!(row["power"].as_f64().unwrap() >= 1.0);
}

#[test]
fn cba_reports_gain_lagrange_and_unit_power() {
    let dir = tempfile::tempdir().unwrap();
    let out = pcshape(
        &["optimize", "cba", "--family", "pam", "--size", "4", "--bits", "7", "--sigma", "0.4", "--alpha-range", "0.5:4", "--depth", "3", "--points-per-depth", "8", "--inner-eps", "1e-6", "--out", "cba.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = data_rows(&read(dir.path(), "cba.csv"));
    assert_eq!(rows.len(), 1);
    let power: f64 = rows[0][3].parse().unwrap();
    assert!((power - 1.0).abs() <= 1e-6);
    let row: serde_json::Value =
        serde_json::from_str(read(dir.path(), "cba.dists.jsonl").lines().next().unwrap()).unwrap();
    assert!(row["alpha"].as_f64().unwrap() > 0.5);
    assert!(row["lambda"].is_number());
    assert_eq!(row["probabilities"].as_array().unwrap().len(), 4);
}

#[test]
fn compare_of_a_file_with_itself_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let ok = pcshape(
        &["optimize", "ba", "--family", "pam", "--size", "4", "--bits", "7", "--sigma", "0.2:0.6:0.2", "--out", "one.csv"],
        dir.path(),
    );
    assert!(ok.status.success());
    let out = pcshape(
        &["compare", "one.dists.jsonl", "one.dists.jsonl", "--out", "cmp.csv"],
        dir.path(),
    );
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("curve_difference_energy = 0.0"));
    for row in data_rows(&read(dir.path(), "cmp.csv")) {
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.0);
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
    }
    let summary: serde_json::Value =
        serde_json::from_str(&read(dir.path(), "cmp.summary.json")).unwrap();
    assert_eq!(summary["curve_difference_energy"].as_f64().unwrap(), 0.0);
}

#[test]
fn compare_rejects_mismatched_grids() {
    let dir = tempfile::tempdir().unwrap();
    for (name, grid) in [("g1.csv", "0.1:0.5:0.2"), ("g2.csv", "0.1:0.7:0.3")] {
        let ok = pcshape(
            &["optimize", "ba", "--family", "pam", "--size", "2", "--bits", "6", "--sigma", grid, "--out", name],
            dir.path(),
        );
        assert!(ok.status.success());
    }
    let out = pcshape(
        &["compare", "g1.dists.jsonl", "g2.dists.jsonl", "--out", "bad.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_constellation_from_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("tri.json"),
        r#"{"dimension": 2, "points": [[1.0, 0.0], [-0.5, 0.8], [-0.5, -0.8]]}"#,
    )
    .unwrap();
    let out = pcshape(
        &["mi-curve", "--family", "custom", "--points-file", "tri.json", "--bits", "5", "--sigma", "0.4", "--out", "tri.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mi: f64 = data_rows(&read(dir.path(), "tri.csv"))[0][2].parse().unwrap();
    assert!(mi > 0.0 && mi < (3.0_f64).log2() + 1e-12);
}

#[test]
fn snr_grid_matches_sigma_equivalent() {
    let dir = tempfile::tempdir().unwrap();
    // for 2-PAM at unit power, snr = 1/sigma^2: 0 dB <-> sigma = 1
    let ok = pcshape(
        &["mi-curve", "--family", "pam", "--size", "2", "--bits", "8", "--snr-db", "0", "--out", "snr.csv"],
        dir.path(),
    );
    assert!(ok.status.success(), "{}", String::from_utf8_lossy(&ok.stderr));
    let ok = pcshape(
        &["mi-curve", "--family", "pam", "--size", "2", "--bits", "8", "--sigma", "1", "--out", "sig.csv"],
        dir.path(),
    );
    assert!(ok.status.success());
    let a = data_rows(&read(dir.path(), "snr.csv"));
    let b = data_rows(&read(dir.path(), "sig.csv"));
    let mi_a: f64 = a[0][2].parse().unwrap();
    let mi_b: f64 = b[0][2].parse().unwrap();
    assert!((mi_a - mi_b).abs() < 1e-12);
}
