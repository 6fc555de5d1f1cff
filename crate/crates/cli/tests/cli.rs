use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn signatures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../signatures")
}

fn sig(name: &str) -> String {
    signatures().join(name).display().to_string()
}

fn pmc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmc"))
        .args(args)
        .env_remove("PMC_SEED")
        .output()
        .expect("pmc runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = pmc(&all);
    let doc = serde_json::from_slice(&out.stdout).expect("stdout is one JSON document");
    (out.status.code().unwrap(), doc)
}

#[test]
fn eval_row_masses() {
    let s = sig("kernels.json");
    let (code, doc) = json(&["--sig", &s, "eval", &sig("mass.pmc")]);
    assert_eq!(code, 0);
    assert_eq!(doc["morphism"], serde_json::json!([[1.0], [0.5]]));
    assert_eq!(doc["cod"], "[]");
}

#[test]
fn eval_empty_identity_is_the_unit_scalar() {
    let (code, doc) = json(&["--expr", "eval", "id[]"]);
    assert_eq!(code, 0);
    assert_eq!(doc["morphism"], serde_json::json!([[1.0]]));
}

#[test]
fn type_errors_exit_one() {
    let s = sig("kernels.json");
    let out = pmc(&["--sig", &s, "--expr", "eval", "f ; f"]);
    assert_eq!(out.status.code(), Some(1));
    let out = pmc(&["--sig", &s, "--expr", "eval", "f ;"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error at"));
}

#[test]
fn missing_payload_exits_two() {
    let s = sig("kernels.json");
    assert_eq!(pmc(&["--sig", &s, "--backend", "par", "--expr", "eval", "f"]).status.code(), Some(2));
    assert_eq!(pmc(&["--backend", "finstoch", "--expr", "eval", "unit[]"]).status.code(), Some(0));
}

#[test]
fn separation_example_orders() {
    let s = sig("separation.json");
    let (r, t) = (sig("R.pmc"), sig("S.pmc"));
    let (code, doc) = json(&["--backend", "rel", "--sig", &s, "order", &r, &t]);
    assert_eq!(code, 0);
    assert_eq!(doc["holds"], true);
    assert!(doc["witness"].is_array());
    let (code, doc) = json(&["--backend", "rel", "--sig", &s, "order", "--relation", "restriction", &r, &t]);
    assert_eq!(code, 3);
    assert_eq!(doc["holds"], false);
}

#[test]
fn order_is_reflexive_with_the_discard_witness() {
    let s = sig("kernels.json");
    let (code, doc) = json(&["--sig", &s, "--expr", "order", "f", "f"]);
    assert_eq!(code, 0);
    assert_eq!(doc["witness"], serde_json::json!([[1.0], [1.0], [1.0], [1.0]]));
}

#[test]
fn validity_example() {
    let s = sig("validity.json");
    let (code, doc) = json(&["--sig", &s, "--expr", "validity", "sigma", "fuzzy"]);
    assert_eq!(code, 0);
    assert!((doc["prior_validity"].as_f64().unwrap() - 0.6).abs() < 1e-9);
    assert!((doc["posterior_validity"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-9);
    assert_eq!(doc["holds"], true);
}

#[test]
fn conditional_of_joint_state() {
    let s = sig("kernels.json");
    let (code, doc) = json(&["--sig", &s, "--expr", "conditional", "joint"]);
    assert_eq!(code, 0);
    assert_eq!(doc["marginal"], serde_json::json!([[0.4, 0.6]]));
    assert_eq!(doc["conditional"], serde_json::json!([[0.5, 0.5], [0.5, 0.5]]));
}

#[test]
fn bayes_of_identity_is_supported_on_the_diagonal() {
    let s = sig("kernels.json");
    let (code, doc) = json(&["--sig", &s, "--expr", "bayes", "id[X]", "prior"]);
    assert_eq!(code, 0);
    assert_eq!(doc["inverse"], serde_json::json!([[1.0, 0.0], [0.0, 1.0]]));
}

#[test]
fn laws_write_reports_and_set_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().display().to_string();
    let (code, doc) = json(&["--backend", "rel", "--trials", "50", "laws", "--suites", "rel-appendix,axioms", "--out", &out]);
    assert_eq!(code, 0);
    assert_eq!(doc["passed"], true);
    assert!(dir.path().join("rel-rel-appendix.json").exists());
    assert!(dir.path().join("rel-axioms.json").exists());

    let (code, doc) = json(&["--backend", "rel", "--trials", "50", "laws", "--suites", "balanced"]);
    assert_eq!(code, 4);
    assert_eq!(doc["passed"], false);

    assert_eq!(pmc(&["--trials", "0", "laws"]).status.code(), Some(1));
    assert_eq!(pmc(&["laws", "--suites", "nonsense"]).status.code(), Some(1));
    assert_eq!(pmc(&["--backend", "par", "laws", "--suites", "rel-appendix"]).status.code(), Some(2));
}

#[test]
fn seed_comes_from_the_environment() {
    let run = |env: Option<&str>, seed: &str| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_pmc"));
        cmd.args(["--json", "--seed", seed, "gen-sig"]);
        match env {
            Some(v) => cmd.env("PMC_SEED", v),
            None => cmd.env_remove("PMC_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    assert_eq!(run(Some("9"), "1"), run(None, "9"));
    assert_ne!(run(None, "1"), run(None, "9"));
    let bad = Command::new(env!("CARGO_BIN_EXE_pmc")).arg("gen-sig").env("PMC_SEED", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn generated_signatures_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("random.json");
    let out = pmc(&["--json", "gen-sig", "--card", "2", "--count", "3"]);
    std::fs::write(&path, &out.stdout).unwrap();
    let p = path.display().to_string();
    for backend in ["finstoch", "par", "rel"] {
        let out = pmc(&["--sig", &p, "--backend", backend, "--expr", "eval", "(k0 * k1) ; swap[X|X] ; (k2 * id[X])"]);
        assert!(out.status.success(), "{backend}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(pmc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(pmc(&["--backend", "quantum", "eval", "x"]).status.code(), Some(1));
    assert_eq!(pmc(&["--help"]).status.code(), Some(0));
}
