use std::path::Path;
use std::process::{Command, Output};

use levykit::levycalc::levy_khintchin;
use levykit::Complex64;
use levykit_cli::ModelSpec;
use serde_json::Value;

const POISSON: &str = r#"{
  "levy": {
    "mu": 0.0,
    "sigma": 0.0,
    "jump": { "type": "atoms", "atoms": [ { "size": 1.0, "intensity": 1.0 } ] },
    "truncation": { "type": "zero" }
  },
  "horizon": 1.0
}"#;

fn spec_path(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../specs").join(name).display().to_string()
}

fn levykit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_levykit")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scalar(env: &Value, name: &str) -> Complex64 {
    let s = &env["outputs"][name];
    Complex64::new(s["re"].as_f64().unwrap(), s["im"].as_f64().unwrap())
}

#[test]
fn poisson_characteristic_function() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("poisson.json");
    std::fs::write(&spec, POISSON).unwrap();
    let env = json(&levykit(&["charfn", "--spec", spec.to_str().unwrap(), "--u", "1", "--json"]));
    let v = scalar(&env, "phi(u=1)");
    let exact = (Complex64::new(0.0, 1.0).exp() - 1.0).exp();
    assert!((v - exact).norm() < 1e-14);
    assert_eq!(env["outputs"]["phi(u=1)"]["error_kind"], "tolerance");
}

#[test]
fn envelope_matches_library_call() {
    let path = spec_path("mv.json");
    let env = json(&levykit(&["charfn", "--spec", &path, "--u=-2.5,3", "--json"]));
    let spec = ModelSpec::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    for u in [-2.5, 3.0] {
        let direct = levy_khintchin(u, &spec.triplet().unwrap(), &spec.schedule().unwrap(), spec.horizon).unwrap();
        assert_eq!(scalar(&env, &format!("phi(u={u})")), direct);
    }
    assert_eq!(env["input_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn identical_inputs_give_identical_csv() {
    let path = spec_path("esscher.json");
    let run = || {
        let dir = tempfile::tempdir().unwrap();
        let out = levykit(&[
            "simulate",
            "--spec",
            &path,
            "--paths",
            "500",
            "--seed",
            "3",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let csv = std::fs::read(dir.path().join("paths.csv")).unwrap();
        (csv, String::from_utf8(out.stdout).unwrap())
    };
    let (a, _) = run();
    let (b, _) = run();
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.lines().nth(1).unwrap() == "path_id,value_re,value_im");
    assert_eq!(text.lines().count(), 502);
}

#[test]
fn schema_violations_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    for (k, bad) in [
        r#"{"levy": {"mu": 0, "sigma": 0.1, "extra": 1}, "horizon": 1}"#,
        r#"{"levy": {"mu": 0, "sigma": 0.1}, "horizon": -1}"#,
        r#"{"levy": {"mu": 0, "sigma": 0.1, "jump": {"type": "stable"}}, "horizon": 1}"#,
        r#"{"levy": {"mu": 0, "sigma": 0.1}, "representation": {"id": "exp_return"}, "horizon": 1}"#,
        r#"{"levy": {"mu": 0, "sigma": 0.1}, "schedule": [{"time": 0.5, "law": {"type": "atoms", "atoms": [{"size": 1, "prob": 0.5}]}}], "horizon": 1}"#,
        "not json",
    ]
    .iter()
    .enumerate()
    {
        let spec = dir.path().join(format!("bad{k}.json"));
        std::fs::write(&spec, bad).unwrap();
        let out = levykit(&["charfn", "--spec", spec.to_str().unwrap(), "--json"]);
        assert_eq!(out.status.code(), Some(2), "case {k}");
        let reason: Value = serde_json::from_slice(&out.stderr).unwrap();
        assert_eq!(reason["exit_code"], 2);
    }
    assert_eq!(levykit(&["charfn"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("degenerate.json");
    std::fs::write(
        &spec,
        r#"{"levy": {"mu": 0, "sigma": 0}, "representation": {"id": "identity"}, "horizon": 1}"#,
    )
    .unwrap();
    let out = levykit(&["density", "--spec", spec.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let reason: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(reason["error"], "non_decaying_char_fn");
}

#[test]
fn mv_demo_reports_reference_values() {
    let env = json(&levykit(&["mv-demo", "--json"]));
    assert!((scalar(&env, "a").re - 4.48).abs() <= 0.01);
    assert!((scalar(&env, "g_minus(0)").re - 0.022).abs() <= 0.002);
    assert!(env["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn mellin_at_zero_is_sign_split() {
    let env = json(&levykit(&["mellin", "--spec", &spec_path("mv.json"), "--alpha", "0,0:1", "--json"]));
    let total = scalar(&env, "g_plus(0)") + scalar(&env, "g_minus(0)");
    assert!((total.re - 1.0).abs() < 1e-12);
    assert!(env["outputs"]["g_plus(0+1i)"]["re"].is_number());
}

#[test]
fn utility_without_positions_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("zero.json");
    std::fs::write(
        &spec,
        r#"{"levy": {"mu": 0.1, "sigma": 0.2},
            "utility": {"lambda_l": 0, "lambda_v": 0, "theta": 1, "law": {"type": "gaussian", "mean": 0, "var": 0.01}},
            "horizon": 1}"#,
    )
    .unwrap();
    let env = json(&levykit(&["utility", "--spec", spec.to_str().unwrap(), "--json"]));
    assert!((scalar(&env, "expected_utility").re - 1.0).abs() < 1e-14);
}

#[test]
fn zero_tilt_leaves_characteristics_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("zero_tilt.json");
    std::fs::write(
        &spec,
        r#"{"levy": {"mu": 0.1, "sigma": 0.2, "jump": {"type": "gaussian_cpp", "intensity": 1, "mean": 0, "var": 0.01}},
            "tilt": {"id": "affine", "re": 0},
            "horizon": 1}"#,
    )
    .unwrap();
    let env = json(&levykit(&["girsanov", "--spec", spec.to_str().unwrap(), "--json"]));
    assert!((scalar(&env, "q_drift").re - 0.1).abs() < 1e-12);
    assert!((scalar(&env, "q_jump_intensity").re - 1.0).abs() < 1e-12);
    assert!((scalar(&env, "normaliser").re - 1.0).abs() < 1e-14);
}

#[test]
fn density_writes_three_panels() {
    let dir = tempfile::tempdir().unwrap();
    let out = levykit(&["density", "--spec", &spec_path("mv.json"), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["subdensity_negative", "subdensity_positive", "wealth_density"] {
        let text = std::fs::read_to_string(dir.path().join(format!("{name}.csv"))).unwrap();
        assert!(text.starts_with("# "));
        assert_eq!(text.lines().nth(1), Some("x,density"));
    }
}

#[test]
fn verify_suites_pass() {
    for suite in ["yor", "modulus"] {
        let env = json(&levykit(&["verify", "--suite", suite, "--json"]));
        assert!(env["checks"][0]["pass"].as_bool().unwrap(), "{suite}");
    }
    let env = json(&levykit(&["verify", "--suite", "pii-mean", "--paths", "20000", "--json"]));
    assert!(env["checks"][0]["pass"].as_bool().unwrap());
    let env = json(&levykit(&["verify", "--suite", "martingale", "--paths", "20000", "--json"]));
    assert_eq!(env["checks"].as_array().unwrap().len(), 3);
}
