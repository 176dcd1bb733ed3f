//! End-to-end tests of the command-line interface: file formats, exit codes,
//! the resource guard, and byte-level determinism of reports.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hopfwb"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(output: &Output) -> serde_json::Value {
    assert!(
        output.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is JSON")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn classes_reports_commutator_sizes() {
    let out = run(&["classes", "--level", "4"]);
    let json = stdout_json(&out);
    // Pascal pattern: sizes at level n are the binomials.
    let levels = json["levels"].as_array().unwrap();
    for (n, level) in levels.iter().enumerate() {
        let sizes: Vec<u64> = level["classes"]
            .as_array()
            .unwrap()
            .iter()
            .map(|c| c["size"].as_u64().unwrap())
            .collect();
        let binomials: Vec<u64> = (0..=n as u64)
            .map(|k| {
                (1..=n as u64).product::<u64>()
                    / ((1..=k).product::<u64>().max(1)
                        * (1..=(n as u64 - k)).product::<u64>().max(1))
            })
            .collect();
        assert_eq!(sizes, binomials, "level {n}");
    }
    assert_eq!(json["meta"]["command"], "classes");
}

#[test]
fn classes_lists_zero_bucket_for_killed_words() {
    let dir = tempfile::tempdir().unwrap();
    let pres = write_file(
        dir.path(),
        "p.json",
        r#"{"d":2,"relations":[],"zeros":["12"]}"#,
    );
    let out = run(&["--pres", &pres, "classes", "--level", "2", "--verbose"]);
    let json = stdout_json(&out);
    let level2 = &json["levels"][2]["classes"];
    let zero_entry = level2
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["zero"] == serde_json::json!(true))
        .expect("zero bucket present");
    assert_eq!(zero_entry["size"], serde_json::json!(1));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    for args in [
        vec!["verify-all", "--level", "3", "--seed", "11"],
        vec![
            "schur",
            "--phi",
            "geometric:1/2",
            "--level",
            "4",
            "--samples",
            "25",
            "--seed",
            "7",
        ],
        vec!["classes", "--level", "3"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "report for {args:?} not deterministic");
    }
}

#[test]
fn norm_and_cesaro_read_element_files() {
    let dir = tempfile::tempdir().unwrap();
    let element = write_file(
        dir.path(),
        "e.json",
        r#"{"terms":[{"class":"","re":"1"},{"class":"1","re":"1/2","im":"0"}]}"#,
    );
    let out = run(&["norm", "--element", &element, "--level", "4"]);
    let json = stdout_json(&out);
    let norm = json["norm"].as_f64().unwrap();
    // I + L_1/2 on the commutative quotient: between 1 and 1.5.
    assert!(norm > 1.0 && norm <= 1.5 + 1e-12);

    let out = run(&["cesaro", "--element", &element, "--k", "2", "--level", "4"]);
    let json = stdout_json(&out);
    let terms = json["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert_eq!(terms[1]["re"], "1/4"); // (1 - 1/2) * 1/2
}

#[test]
fn check_oracle_and_drury_exit_zero_on_agreement() {
    let out = run(&["check-oracle", "--level", "4"]);
    let json = stdout_json(&out);
    assert_eq!(json["agree"], serde_json::json!(true));

    let out = run(&["drury", "--d", "3", "--level", "4"]);
    let json = stdout_json(&out);
    assert_eq!(json["all_ok"], serde_json::json!(true));
}

#[test]
fn verify_all_passes_and_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("report.json");
    let out = run(&[
        "--out",
        out_path.to_str().unwrap(),
        "verify-all",
        "--level",
        "4",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(json["all_pass"], serde_json::json!(true));
    assert!(json["checks"].as_array().unwrap().len() >= 15);
}

#[test]
fn schur_reports_bounds() {
    let out = run(&["schur", "--phi", "one", "--level", "4", "--samples", "25"]);
    let json = stdout_json(&out);
    assert_eq!(json["lower_bound"].as_f64().unwrap(), 1.0);
    assert_eq!(json["certified_upper"].as_f64().unwrap(), 1.0);

    let out = run(&[
        "schur",
        "--phi",
        "indicator:1",
        "--level",
        "4",
        "--samples",
        "25",
    ]);
    let json = stdout_json(&out);
    assert!(json["lower_bound"].as_f64().unwrap() <= 1.0 + 1e-9);
    assert!(json["certified_upper"].is_null());
}

#[test]
fn char_reports_value_and_residual() {
    let out = run(&[
        "char", "--lambda", "0.5,0", "--op", "1", "--level", "14", "--mu", "0,0.5",
    ]);
    let json = stdout_json(&out);
    assert!((json["value"]["re"].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!(json["convolution_residual"].as_f64().unwrap() <= 1e-6);
    assert!(
        json["convolution_bound"].as_f64().unwrap()
            >= json["convolution_residual"].as_f64().unwrap()
    );
}

#[test]
fn hopf_test_accepts_custom_ideal_file() {
    let dir = tempfile::tempdir().unwrap();
    let ideal = write_file(
        dir.path(),
        "ideal.json",
        r#"{"generators":[{"terms":[{"word":"1","re":"1"},{"word":"2","re":"1"}]}]}"#,
    );
    let out = run(&["hopf-test", "--ideal", &ideal, "--degree", "1"]);
    let json = stdout_json(&out);
    assert_eq!(json["coideal"], serde_json::json!(false));

    // Default: the presentation-induced ideal of the commutator quotient.
    let out = run(&["hopf-test", "--degree", "2"]);
    let json = stdout_json(&out);
    assert_eq!(json["coideal"], serde_json::json!(true));
    assert_eq!(
        json["indicator_sets"],
        serde_json::json!([["11"], ["12", "21"], ["22"]])
    );
}

#[test]
fn resource_guard_refuses_and_env_overrides() {
    let out = bin()
        .env("HOPFWB_MAX_WORDS", "4")
        .args(["classes", "--level", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("resource limit"));

    // --force lifts the guard.
    let out = bin()
        .env("HOPFWB_MAX_WORDS", "4")
        .args(["--force", "classes", "--level", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn errors_use_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_file(
        dir.path(),
        "bad.json",
        r#"{"d":2,"relations":[["1","12"]]}"#,
    );
    let out = run_expect_failure(&["--pres", &bad, "classes", "--level", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not homogeneous"));

    let out = run_expect_failure(&["matrix", "--class", "0", "--level", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

fn run_expect_failure(args: &[&str]) -> Output {
    let out = bin().args(args).output().expect("binary runs");
    assert!(!out.status.success());
    out
}

#[test]
fn spectrum_scan_matches_classes_and_fails_on_scan_mismatch_never() {
    let out = run(&["spectrum-scan", "--max-degree", "3"]);
    let json = stdout_json(&out);
    assert_eq!(json["matches_class_list"], serde_json::json!(true));
    // The zero element plus one support per class through level 3.
    let supports = json["semigroup_like_supports"].as_array().unwrap();
    assert_eq!(supports.len(), 1 + (1 + 2 + 3 + 4));
}

#[test]
fn autos_emits_group_table() {
    let dir = tempfile::tempdir().unwrap();
    let pres = write_file(
        dir.path(),
        "c3.json",
        r#"{"d":3,"relations":[["12","21"],["13","31"],["23","32"]],"zeros":[]}"#,
    );
    let out = run(&["--pres", &pres, "autos", "--level", "4"]);
    let json = stdout_json(&out);
    assert_eq!(json["count"], serde_json::json!(6));
    let table = json["group_table"].as_array().unwrap();
    assert_eq!(table.len(), 6);
    // Every row is a permutation of the automorphism indices.
    for row in table {
        let mut seen: Vec<u64> = row
            .as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_u64().unwrap())
            .collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..6).collect::<Vec<u64>>());
    }
}

#[test]
fn multiply_handles_zero_and_identity() {
    let dir = tempfile::tempdir().unwrap();
    let pres = write_file(
        dir.path(),
        "z.json",
        r#"{"d":2,"relations":[],"zeros":["12"]}"#,
    );
    let out = run(&["--pres", &pres, "multiply", "--s", "1", "--t", "2"]);
    let json = stdout_json(&out);
    assert_eq!(json["product"]["zero"], serde_json::json!(true));

    let out = run(&["multiply", "--s", "@", "--t", "21"]);
    let json = stdout_json(&out);
    assert_eq!(json["product"]["rep"], serde_json::json!("12"));
    assert_eq!(json["product"]["size"], serde_json::json!(2));
}

#[test]
fn matrix_emits_row_major_entries() {
    let out = run(&["matrix", "--class", "1", "--level", "2"]);
    let json = stdout_json(&out);
    let dim = json["dim"].as_u64().unwrap() as usize;
    let rows = json["rows"].as_array().unwrap();
    assert_eq!(rows.len(), dim);
    assert_eq!(rows[0].as_array().unwrap().len(), dim);
    // Column of the identity class holds the weight onto the class of "1".
    let entry = rows[1].as_array().unwrap()[0].as_array().unwrap();
    assert!((entry[0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(entry[1].as_f64().unwrap(), 0.0);
}
