//! End-to-end tests for the `clonetrade` binary: output contracts, exit
//! codes, and byte-level determinism. Grids are kept tiny because the test
//! binary runs unoptimized.

use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clonetrade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn targets_file(json: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().expect("temp file");
    f.write_all(json.as_bytes()).expect("write targets");
    f
}

#[test]
fn symfid_prints_rational_and_fixed_decimal() {
    let out = run(&["symfid", "--M", "1", "--N", "2", "--L", "1", "--d", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("5/6"), "missing exact value: {text}");
    assert!(
        text.contains("0.833333333333333"),
        "missing 15-digit decimal: {text}"
    );
    assert!(
        text.contains("agrees"),
        "missing cross-check verdict: {text}"
    );
}

#[test]
fn symfid_two_to_four_reports_both_layers() {
    let out = run(&["symfid", "--M", "2", "--N", "4", "--L", "2", "--d", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("23/30"), "missing computed optimum: {text}");
    assert!(
        text.contains("61/69"),
        "missing published-value note: {text}"
    );
}

#[test]
fn symfid_global_fidelity_case() {
    let out = run(&["symfid", "--M", "1", "--N", "3", "--L", "3", "--d", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("1/2"));
}

#[test]
fn symfid_rejects_invalid_parameters() {
    let out = run(&["symfid", "--M", "1", "--N", "2", "--L", "3", "--d", "2"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("error"));
}

#[test]
fn check_single_site_targets_below_optimum_are_feasible() {
    let f = targets_file(r#"{"M": 1, "N": 2, "d": 2, "targets": {"01": 0.8, "10": 0.8}}"#);
    let out = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"verdict\": \"Feasible\""), "{text}");
    assert!(text.contains("\"witness\""), "{text}");
}

#[test]
fn check_targets_above_optimum_are_infeasible() {
    let f = targets_file(r#"{"M": 1, "N": 2, "d": 2, "targets": {"01": 0.9, "10": 0.9}}"#);
    let out = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("\"verdict\": \"Infeasible\""));
}

#[test]
fn check_exact_boundary_targets_are_feasible() {
    // symmetric single-site boundary for 2→3 at d = 2; exact rationals take
    // the rational fast path, so the verdict is exact despite zero slack
    let f = targets_file(
        r#"{"M": 2, "N": 3, "d": 2,
            "targets": {"001": "11/12", "010": "11/12", "100": "11/12"}}"#,
    );
    let out = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"verdict\": \"Feasible\""), "{text}");
    assert!(text.contains("0.916666666666667"), "{text}");
}

#[test]
fn check_pair_targets_route_to_the_case_study() {
    let f = targets_file(
        r#"{"M": 2, "N": 4, "L": 2, "d": 2,
            "targets": {"1100": 0.76, "0011": 0.76, "1010": 0.76,
                        "0101": 0.76, "0110": 0.76, "1001": 0.76}}"#,
    );
    let out = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"verdict\": \"Feasible\""), "{text}");
    assert!(text.contains("symmetric_optimum"), "{text}");
}

#[test]
fn check_unsupported_shape_exits_three_with_classification() {
    let f = targets_file(r#"{"M": 3, "N": 6, "L": 1, "d": 2, "targets": {"000001": 0.8}}"#);
    let out = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let text = stderr(&out);
    assert!(text.contains("unsupported"), "{text}");
    assert!(text.contains("Excluded"), "{text}");
}

#[test]
fn check_rejects_malformed_target_files() {
    let f = targets_file(r#"{"M": 1, "N": 2, "d": 2}"#);
    let out = run(&["check", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("targets"));
}

#[test]
fn region_pair_sweep_has_frozen_header_and_full_grid() {
    let out = run(&["region", "--mode", "2to4", "--grid", "4"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("F_1100,F_1010,F_0110,member,class"));
    assert_eq!(lines.count(), 64, "expected grid³ data rows");
    // byte-identical on a second run
    let again = run(&["region", "--mode", "2to4", "--grid", "4"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn region_surface_sweep_emits_site_columns() {
    let out = run(&[
        "region", "--mode", "one-to-n", "--N", "3", "--d", "2", "--grid", "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("F_1,F_2,F_3"));
    assert_eq!(lines.count(), 9);
    // the symmetric diagonal entry at the floor completes to a valid point
    assert!(
        text.contains("0.333333333333333,0.333333333333333,0.777777777777778"),
        "{text}"
    );
}

#[test]
fn region_writes_to_a_file_when_asked() {
    let path = std::env::temp_dir().join("clonetrade_region_test.csv");
    let out = run(&[
        "region",
        "--mode",
        "2to4",
        "--grid",
        "2",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).expect("CSV written");
    std::fs::remove_file(&path).ok();
    assert!(text.starts_with("F_1100,F_1010,F_0110,member,class\n"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn region_rejects_unknown_mode_and_tiny_grids() {
    let out = run(&["region", "--mode", "triangle", "--grid", "4"]);
    assert!(!out.status.success());
    let out = run(&["region", "--mode", "2to4", "--grid", "1"]);
    assert!(!out.status.success());
}

#[test]
fn verify_fast_passes() {
    let out = run(&["verify", "--scope", "fast"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("fast oracle cross-check"), "{text}");
    assert!(text.contains("all criteria passed"), "{text}");
}

#[test]
fn verify_full_names_the_failing_criteria() {
    let out = run(&["verify", "--scope", "full"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    for k in 1..=12 {
        assert!(
            text.contains(&format!("criterion {k:2} ")),
            "missing criterion {k}: {text}"
        );
    }
    assert!(
        text.contains("failing: criterion 3 (dense-oracle equivalence), criterion 11 (2→4 case-study closure)"),
        "{text}"
    );
}

#[test]
fn verify_rejects_unknown_scope() {
    let out = run(&["verify", "--scope", "partial"]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("unknown scope"));
}

#[test]
fn oracle_reports_eigenvalue_against_closed_form() {
    let out = run(&["oracle", "--M", "1", "--N", "2", "--d", "2", "--L", "1"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"symmetric_fidelity\": \"5/6\""), "{text}");
    assert!(
        text.contains("\"lambda_max\": \"0.833333333333333\""),
        "{text}"
    );
}

#[test]
fn gram_dumps_exact_entries_with_closed_forms() {
    let out = run(&[
        "gram",
        "--M",
        "1",
        "--N",
        "2",
        "--d",
        "2",
        "--spectrum",
        "--inverse",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("\"1/2\""), "{text}");
    assert!(text.contains("\"3/2\""), "{text}");
    assert!(text.contains("\"4/3\""), "{text}");
    // spectrum/inverse closed forms are for the zero label only
    let out = run(&[
        "gram",
        "--M",
        "1",
        "--N",
        "2",
        "--d",
        "2",
        "--y",
        "11",
        "--spectrum",
    ]);
    assert!(!out.status.success());
}
