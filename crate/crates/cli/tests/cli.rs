#![allow(clippy::excessive_precision)]

use std::process::Command;

use ostrowski_cli::json;
use ostrowski_cli::report::CSV_HEADER;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_ostrowski")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let (code, out, err) = run(&full);
    let v = serde_json::from_str(out.trim_end()).unwrap_or_else(|e| panic!("{e}: {out} {err}"));
    (code, v)
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

#[test]
fn bound_thm1_exp1() {
    let (code, v) = run_json(&["bound", "thm1", "--fn", "exp1", "--a", "0", "--b", "1", "--x", "0.5", "--s", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "bound");
    assert_eq!(v["branch"], "less_than_one");
    assert!((f(&v["rhs"]) - 0.420_839_287_058_788_94).abs() < 1e-14);
    assert!((f(&v["lhs"]) - 0.069_560_557_758_917_09).abs() < 1e-14);
    assert_eq!(v["holds"], true);
}

#[test]
fn bound_thm2_is_e_over_root3_times_psi2() {
    let (code, v) = run_json(&["bound", "thm2", "--fn", "exp1", "--x", "0.5", "--q", "2"]);
    assert_eq!(code, 0);
    let psi = f(&v["psi"]);
    assert!((f(&v["rhs"]) - std::f64::consts::E / 3f64.sqrt() * psi).abs() < 1e-15);
}

#[test]
fn designed_error_paths() {
    let (code, _, err) = run(&["bound", "thm1", "--fn", "expdec", "--a", "0", "--b", "1", "--x", "0.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("try --reflect"), "{err}");

    let (code, _, err) = run(&["bound", "thm2", "--fn", "const", "--x", "0.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("zero endpoint derivative"), "{err}");

    let (code, _, err) = run(&["bound", "thm1", "--fn", "exp1", "--x", "-0.25"]);
    assert_eq!(code, 1);
    assert!(err.contains("outside"), "{err}");

    let (code, _, err) = run(&["pdf", "--dist", "ramp", "--x", "0.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("zero endpoint density"), "{err}");
}

#[test]
fn validation_and_usage_errors_exit_1() {
    for args in [
        &["bound", "thm1", "--fn", "exp1", "--x", "0.5", "--s", "1.5"][..],
        &["bound", "thm2", "--fn", "exp1", "--x", "0.5", "--q", "1"],
        &["bound", "thm1", "--fn", "exp1", "--a", "1", "--b", "0", "--x", "0.5"],
        &["bound", "thm1", "--fn", "nope", "--x", "0.5"],
        &["bound", "thm1", "--fn", "exp1"],
        &["integrate", "--fn", "exp1", "--n", "0"],
        &["pdf", "--dist", "nope", "--x", "0.5"],
        &["verify", "--suite", "nope"],
        &["frobnicate"],
    ] {
        let (code, _, _) = run(args);
        assert_eq!(code, 1, "{args:?}");
    }
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn reflection_rescues_decreasing_derivative() {
    let (code, v) = run_json(&["bound", "thm1", "--fn", "expdec", "--x", "0.25", "--reflect"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["reflected"], true);
    assert_eq!(f(&v["details"]["x_reflected"]), 0.75);
    assert!(f(&v["tau"]) < 1.0);
}

#[test]
fn hypothesis_failure_is_reported_with_exit_2() {
    let (code, v) = run_json(&["bound", "thm1", "--fn", "exp1", "--x", "0.5", "--s", "0.5"]);
    assert_eq!(code, 2);
    assert_eq!(v["details"]["hypothesis_ok"], false);
    assert!(v["rhs"].is_number());
}

#[test]
fn corollary_m() {
    let (code, v) = run_json(&["bound", "corollary-m", "--m", "0.5", "--x", "0.5"]);
    assert_eq!(code, 0);
    assert!((f(&v["rhs"]) - 0.089_276_615_133_806_14).abs() < 1e-14);
    assert!(v["lhs"].is_null());
    let (code, _, _) = run(&["bound", "corollary-m", "--m", "2", "--x", "0.5"]);
    assert_eq!(code, 2);
}

#[test]
fn midpoint_ignores_x() {
    let (_, a) = run_json(&["bound", "midpoint", "--fn", "exp1"]);
    let (_, b) = run_json(&["bound", "thm1", "--fn", "exp1", "--x", "0.5"]);
    assert_eq!(a["rhs"], b["rhs"]);
}

#[test]
fn integrate_examples() {
    let (code, v) = run_json(&["integrate", "--fn", "quad", "--a", "0", "--b", "1", "--n", "4", "--classical-K", "2"]);
    assert_eq!(code, 0);
    assert_eq!(f(&v["details"]["approx"]), 0.328125);
    assert!((f(&v["details"]["classical_bound"]) - 1.0 / 192.0).abs() < 1e-15);
    assert!((f(&v["details"]["true_error"]) - 1.0 / 192.0).abs() < 1e-15);

    let (code, v) = run_json(&["integrate", "--fn", "exp1", "--n", "2", "--bound", "prop1", "--s", "1"]);
    assert_eq!(code, 0);
    assert!((f(&v["rhs"]) - 0.427_347_006_516_938_4).abs() < 1e-14);
    assert!((f(&v["lhs"]) - 0.017_769_111_808_837_16).abs() < 1e-14);
    assert_eq!(v["details"]["per_interval"].as_array().unwrap().len(), 2);

    let (_, one) = run_json(&["integrate", "--fn", "exp1", "--n", "1", "--bound", "prop1"]);
    let (_, mid) = run_json(&["bound", "midpoint", "--fn", "exp1"]);
    assert_eq!(one["rhs"], mid["rhs"]);
}

#[test]
fn long_interval_breaks_unweighted_certificate() {
    let (code, v) = run_json(&["integrate", "--fn", "exp1", "--a", "0", "--b", "4", "--bound", "prop1"]);
    assert_eq!(code, 2);
    assert_eq!(v["holds"], false);
    assert_eq!(v["details"]["weighted_holds"], true);
    assert_eq!(v["details"]["unweighted_form_valid"], false);
}

#[test]
fn pdf_examples() {
    let (code, v) = run_json(&["pdf", "--dist", "texp1", "--x", "0.5", "--s", "1"]);
    assert_eq!(code, 0);
    assert!((f(&v["lhs"]) - 0.040_482_624_332_528_14).abs() < 1e-12);
    assert!((f(&v["rhs"]) - 0.244_918_662_403_709_13).abs() < 1e-12);
    assert!((f(&v["details"]["expectation"]) - 1.0 / (std::f64::consts::E - 1.0)).abs() < 1e-14);

    let (code, v) = run_json(&["pdf", "--dist", "texp1", "--x", "0.5", "--q", "2"]);
    assert_eq!(code, 0);
    assert!((f(&v["rhs"]) - 0.291_654_338_968_295_2).abs() < 1e-12);

    let (code, v) = run_json(&["pdf", "--dist", "uniform", "--x", "0.5"]);
    assert_eq!(code, 0);
    assert_eq!(v["branch"], "one");
    assert_eq!(f(&v["lhs"]), 0.0);
}

#[test]
fn verify_suites() {
    let (code, v) = run_json(&["verify", "--suite", "lemma1", "--fn", "quad"]);
    assert_eq!(code, 0);
    let checks = v["details"]["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["passed"] == true && f(&c["observed"]) <= 1e-9));

    let (code, v) = run_json(&["verify", "--suite", "psi-oracle", "--grid", "25"]);
    assert_eq!(code, 0);
    for c in v["details"]["checks"].as_array().unwrap() {
        assert!(f(&c["observed"]) <= 1e-10);
    }

    let (code, v) = run_json(&["verify", "--suite", "default"]);
    assert_eq!(code, 0);
    assert_eq!(v["details"]["summary"]["violations"], 0);
    assert_eq!(v["holds"], true);
}

#[test]
fn verify_csv_has_one_row_per_record() {
    let (code, out, _) = run(&["--csv", "verify", "--suite", "soundness", "--fn", "exp1"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert_eq!(lines.count(), 2 * 3 * 11);
}

#[test]
fn json_round_trips_byte_identically() {
    for args in [
        &["bound", "thm1", "--fn", "eqfam_s0.5", "--x", "0.3", "--s", "0.5"][..],
        &["integrate", "--fn", "sinh", "--n", "8", "--bound", "prop2", "--q", "3"],
        &["pdf", "--dist", "eqdens", "--x", "0.7", "--s", "0.5"],
        &["catalog"],
        &["verify", "--suite", "certificates"],
    ] {
        let mut full = vec!["--json"];
        full.extend_from_slice(args);
        let (_, out, _) = run(&full);
        let line = out.trim_end();
        let parsed: Value = serde_json::from_str(line).unwrap();
        assert_eq!(json::to_string(&parsed).unwrap(), line, "{args:?}");
    }
}

#[test]
fn out_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let (code, stdout, _) = run(&["--json", "--out", path.to_str().unwrap(), "catalog"]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let ids: Vec<_> = v["details"]["functions"].as_array().unwrap().iter().map(|e| e["id"].clone()).collect();
    assert!(ids.contains(&Value::from("exp1")));
    assert_eq!(v["details"]["distributions"].as_array().unwrap().len(), 5);
}

#[test]
fn tol_flag_is_validated() {
    assert_eq!(run(&["--tol", "-1", "catalog"]).0, 1);
    assert_eq!(run(&["--tol", "1e-6", "bound", "thm1", "--fn", "exp1", "--x", "0.5"]).0, 0);
}

#[test]
fn negative_interval_arguments() {
    let (code, v) = run_json(&["bound", "thm1", "--fn", "exp1", "--a", "-1", "--b", "0", "--x", "-0.5"]);
    assert_eq!(code, 0);
    assert_eq!(f(&v["params"]["a"]), -1.0);
}
