//! End-to-end tests of the command-line interface: exit codes, report
//! shapes, determinism across worker counts, config merging, CSV dumps.

use serde_json::Value;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_pg3par"));
    c.env_remove("PG3_THREADS");
    c
}

fn json_stdout(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn coords_dumps_the_axis_fixture() {
    let out = bin().args(["coords", "--pluecker", "0,0,1,0,0,0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    let line = &report["lines"][0];
    assert_eq!(line["x"], serde_json::json!([0.0, 0.0, 1.0]));
    assert_eq!(line["y"], serde_json::json!([0.0, 0.0, 1.0]));
    // Run metadata goes to stderr, leaving stdout deterministic.
    let meta: Value = serde_json::from_slice(&out.stderr).expect("meta on stderr");
    assert_eq!(meta["command"], "coords");
}

#[test]
fn coords_reads_input_files_in_both_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("lines.json");
    std::fs::write(
        &input,
        r#"[[0,0,1,0,0,0], {"pluecker": [1,0,0,0,0,0]}]"#,
    )
    .unwrap();
    let csv = dir.path().join("lines.csv");
    let out = bin()
        .args(["coords", "--input"])
        .arg(&input)
        .arg("--csv")
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["lines"].as_array().unwrap().len(), 2);
    // x-axis line: u = w = e_x.
    assert_eq!(report["lines"][1]["x"], serde_json::json!([1.0, 0.0, 0.0]));
    let body = std::fs::read_to_string(&csv).unwrap();
    assert!(body.starts_with("index,c0,c1,c2,c3,c4,c5,x0,x1,x2,y0,y1,y2\n"));
    assert_eq!(body.lines().count(), 3);
}

#[test]
fn coords_without_input_is_a_usage_error() {
    let out = bin().arg("coords").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no input lines"));
}

#[test]
fn verify_spread_passes_on_the_closed_form_profile() {
    let out = bin()
        .args(["verify-spread", "--profile", "complex:2.0", "--n", "500", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["pass"], true);
    assert_eq!(report["histogram"]["1"], 500);
    assert_eq!(report["profile"]["c"], 2.0);
}

#[test]
fn shifted_ordinary_family_fails_with_double_cover_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let out = bin()
        .args([
            "verify-parallelism",
            "--profile",
            "complex:1.0",
            "--s",
            "1",
            "--t",
            "1",
            "--no-oriented",
            "--n",
            "60",
        ])
        .arg("--out")
        .arg(&report_path)
        .output()
        .unwrap();
    // Verification failure: exit 1, but the report is still written.
    assert_eq!(out.status.code(), Some(1));
    let report: Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["pass"], false);
    let witnesses = report["witnesses"].as_array().unwrap();
    assert!(!witnesses.is_empty());
    assert_eq!(witnesses[0]["classes"].as_array().unwrap().len(), 2);
    // Metadata lands next to the report, keeping the report byte-stable.
    let meta_path = dir.path().join("report.json.meta.json");
    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(&meta_path).unwrap()).unwrap();
    assert_eq!(meta["command"], "verify-parallelism");
}

#[test]
fn oriented_shifted_family_passes() {
    let out = bin()
        .args([
            "verify-parallelism",
            "--profile",
            "complex:1.0",
            "--s",
            "1",
            "--t",
            "1",
            "--n",
            "60",
            "--seed",
            "3",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["multiplicity_histogram"]["1"], 60);
}

#[test]
fn clifford_family_verifies_from_the_cli() {
    let out = bin()
        .args(["verify-parallelism", "--family", "clifford", "--side", "right", "--n", "200"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["pass"], true);
    assert_eq!(report["family"]["family"], "clifford");
}

#[test]
fn clifford_check_reports_both_identities() {
    let out = bin().args(["clifford-check", "--n", "400"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    let criteria = report["criteria"].as_array().unwrap();
    assert_eq!(criteria.len(), 2);
    assert!(criteria.iter().all(|c| c["pass"] == true));
}

#[test]
fn theorem_suite_quick_passes() {
    let out = bin().args(["theorem-suite", "--quick"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["criteria"].as_array().unwrap().len(), 10);
    assert_eq!(report["pass"], true);
}

#[test]
fn reduce_collapses_the_axes_scale() {
    let out = bin().args(["reduce", "--s", "2", "--t", "1", "--n", "40"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["pass"], true);
    assert_eq!(report["original"]["s"], 2.0);
    assert_eq!(report["reduced"]["s"], 1.0);
}

#[test]
fn reduce_without_scale_is_a_usage_error() {
    let out = bin().args(["reduce", "--t", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing --s"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    let out = bin().args(["verify-spread", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown field"));
}

#[test]
fn malformed_profile_is_a_usage_error() {
    let out = bin()
        .args(["verify-spread", "--profile", "complex:zero", "--n", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["verify-spread", "--profile", "complex:-1.0", "--n", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn flags_override_config_fields() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"n": 300, "seed": 5, "profile": "complex:1.0"}"#).unwrap();
    let out = bin()
        .args(["verify-spread", "--seed", "9", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    assert_eq!(report["samples"], 300);
    assert_eq!(report["seed"], 9);
}

#[test]
fn reports_are_byte_identical_across_worker_counts() {
    let dir = tempfile::tempdir().unwrap();
    let mut bodies = Vec::new();
    for threads in ["1", "3"] {
        let path = dir.path().join(format!("r{threads}.json"));
        let csv = dir.path().join(format!("r{threads}.csv"));
        let out = bin()
            .env("PG3_THREADS", threads)
            .args(["verify-spread", "--n", "400", "--seed", "11"])
            .arg("--out")
            .arg(&path)
            .arg("--csv")
            .arg(&csv)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        bodies.push((std::fs::read(&path).unwrap(), std::fs::read(&csv).unwrap()));
    }
    assert_eq!(bodies[0].0, bodies[1].0, "JSON reports differ across worker counts");
    assert_eq!(bodies[0].1, bodies[1].1, "CSV dumps differ across worker counts");
}

#[test]
fn spread_csv_matches_the_report_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dump.csv");
    let out = bin()
        .args(["verify-spread", "--n", "200", "--seed", "2", "--csv"])
        .arg(&csv)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report = json_stdout(&out);
    let body = std::fs::read_to_string(&csv).unwrap();
    let mut ones = 0u64;
    for (i, row) in body.lines().skip(1).enumerate() {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 5);
        assert_eq!(fields[0].parse::<usize>().unwrap(), i);
        if fields[4] == "1" {
            ones += 1;
        }
    }
    assert_eq!(ones, 200);
    assert_eq!(report["histogram"]["1"], 200);
}

#[test]
fn invalid_worker_count_is_a_usage_error() {
    let out = bin()
        .env("PG3_THREADS", "zero")
        .args(["verify-spread", "--n", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
