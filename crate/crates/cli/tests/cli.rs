mod common;

use std::path::Path;
use std::process::{Command, Output};

fn fewbody(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fewbody"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn solve_writes_json_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", common::coulomb_config());
    let out = fewbody(&["solve", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["problem"], "two_body");
    assert!((v["energies"][0]["re"].as_f64().unwrap() + 0.499876).abs() < 1e-5);
}

#[test]
fn format_and_out_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", common::coulomb_config());
    let target = dir.path().join("r.csv");
    let out = fewbody(&[
        "solve",
        &cfg,
        "--format",
        "csv",
        "--out",
        target.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(target).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn validation_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(
        dir.path(),
        "bad.json",
        &common::coulomb_config().replace("-1/r", "-1/q"),
    );
    let out = fewbody(&["solve", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("phys.potentials[0]"));
    let schema = write(
        dir.path(),
        "schema.json",
        "{\"problem\": \"two_body\", \"phys\": {}}",
    );
    assert_eq!(fewbody(&["solve", &schema]).status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let unbound = common::coulomb_config()
        .replace("-1/r", "exp(-r^2)")
        .replace(
            "\"num\"",
            "\"flags\": {\"invert\": {\"stateindex\": 1, \"target_e\": -1e-3}}, \"num\"",
        );
    let cfg = write(dir.path(), "u.json", &unbound);
    let out = fewbody(&["solve", &cfg]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn missing_config_is_an_io_error() {
    assert_eq!(
        fewbody(&["solve", "/nonexistent/config.json"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn bench_sweeps_nmax() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", common::coulomb_config());
    let out = fewbody(&["bench", &cfg, "--nmax-list", "6,10,14", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(
        rows.iter().map(|r| r[0]).collect::<Vec<_>>(),
        ["6", "10", "14"]
    );
    let energies: Vec<f64> = rows.iter().map(|r| r[3].parse().unwrap()).collect();
    assert!(
        energies.windows(2).all(|w| w[1] <= w[0] + 1e-12),
        "{energies:?}"
    );
}
