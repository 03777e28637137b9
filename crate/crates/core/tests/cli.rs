use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

const FAR_MASSES: &str = r#"{"p": 2, "continuous": {"kind": "lebesgue", "a": -1, "b": 1},
  "dirac": [{"c": 4, "k": 1, "A": 8}, {"c": 2, "k": 2, "A": 6}]}"#;

const ORDERED: &str = r#"{"p": 2, "continuous": {"kind": "lebesgue", "a": -1, "b": 1},
  "dirac": [{"c": -1, "k": 0, "A": 1}, {"c": 1, "k": 1, "A": 2}, {"c": -1, "k": 2, "A": 1}]}"#;

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn sobolev(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sobolev")).args(args).output().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn solve_far_masses() {
    let cfg = file(FAR_MASSES);
    let o = sobolev(&["solve", "--config", cfg.path().to_str().unwrap(), "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let expected = [8181.0 / 2695.0, -837735.0 / 39347.0, -5232.0 / 539.0, -2595.0 / 803.0, 1.0];
    let got: Vec<f64> = v["coeffs"].as_array().unwrap().iter().map(|c| c.as_f64().unwrap()).collect();
    for (g, e) in got.iter().zip(expected) {
        assert!((g - e).abs() <= 1e-8 * e.abs(), "{g} vs {e}");
    }
    assert_eq!(v["method"], "gram");
}

#[test]
fn csv_output() {
    let cfg = file(FAR_MASSES);
    let o = sobolev(&["solve", "--config", cfg.path().to_str().unwrap(), "--n", "2", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("power,coefficient\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn malformed_config() {
    let cfg = file("{\"p\": 2,");
    let o = sobolev(&["solve", "--config", cfg.path().to_str().unwrap(), "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
}

#[test]
fn unbounded_support_needs_p2() {
    let cfg = file(r#"{"p": 1.5, "continuous": {"kind": "laguerre-exp"}}"#);
    let o = sobolev(&["solve", "--config", cfg.path().to_str().unwrap(), "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported: p≠2 on unbounded support"));
}

#[test]
fn interp_counterexample() {
    let pairs = file("[[-1,0],[1,0],[0,1]]");
    let v = stdout_json(&sobolev(&["interp", "--pairs", pairs.path().to_str().unwrap()]));
    assert_eq!(v["coeffs"], serde_json::json!([-1.0, 0.0, 1.0]));
    assert_eq!((v["degree"].as_u64(), v["degree_formula"].as_u64()), (Some(2), Some(3)));
    assert_eq!(v["ordered"], false);
}

#[test]
fn classify_far_masses() {
    let cfg = file(FAR_MASSES);
    let v = stdout_json(&sobolev(&["classify", "--config", cfg.path().to_str().unwrap()]));
    assert_eq!(v["ordered"], false);
    assert_eq!(v["d"], 5);
    assert_eq!(v["d_star"], 2);
}

#[test]
fn zeros_report() {
    let cfg = file(FAR_MASSES);
    let v = stdout_json(&sobolev(&["zeros", "--config", cfg.path().to_str().unwrap(), "--n", "4"]));
    assert_eq!(v["sign_changes_in_delta"], 1);
    assert_eq!(v["roots"].as_array().unwrap().len(), 4);
}

#[test]
fn normeval_residuals() {
    let cfg = file(FAR_MASSES);
    let o = sobolev(&["normeval", "--config", cfg.path().to_str().unwrap(), "--coeffs", "-1,0,1"]);
    let v = stdout_json(&o);
    assert!(v["norm"].as_f64().unwrap() > 0.0);
    assert_eq!(v["residuals"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_zeroloc_on_ordered_norm() {
    let cfg = file(ORDERED);
    let o = sobolev(&["verify", "--config", cfg.path().to_str().unwrap(), "--suite", "zeroloc", "--n-max", "10"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let v = stdout_json(&o);
    assert_eq!(v["pass"], true);
    assert_eq!(v["reports"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_seed_from_environment() {
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_sobolev"))
            .args(["verify", "--suite", "rolle", "--trials", "20"])
            .env("SOBOLEV_SEED", seed)
            .output()
            .unwrap()
    };
    let o = run("7");
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["seed"], 7);
    assert_eq!(run("seven").status.code(), Some(1));
}

#[test]
fn asymptotics_csv() {
    let cfg = file(r#"{"p": 2, "continuous": {"kind": "lebesgue", "a": -1, "b": 1}}"#);
    let o = sobolev(&[
        "asymptotics", "--config", cfg.path().to_str().unwrap(), "--n-max", "6", "--j-max", "1", "--format", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("n,j,nth_root,ks,green_re,green_im"));
}

#[test]
fn output_is_deterministic() {
    let cfg = file(FAR_MASSES);
    let args = ["solve", "--config", cfg.path().to_str().unwrap(), "--n", "5"];
    assert_eq!(sobolev(&args).stdout, sobolev(&args).stdout);
}

#[test]
fn help_everywhere() {
    assert_eq!(sobolev(&["--help"]).status.code(), Some(0));
    for sub in ["solve", "zeros", "classify", "asymptotics", "interp", "normeval", "verify"] {
        let o = sobolev(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0), "{sub}");
        assert!(!o.stdout.is_empty());
    }
    assert_eq!(sobolev(&["frobnicate"]).status.code(), Some(1));
}
