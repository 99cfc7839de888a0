use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_isoconst"));
    c.env_remove("SPREAD_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const CLAW: &str = "# claw\nvertices 4\npi 0 0\npi 1 1/3\npi 2 1/3\npi 3 1/3\nedge 0 1\nedge 0 2\nedge 0 3\n";
const S4: &str = "vertices 4\npi 0 1/4\npi 1 1/4\npi 2 1/4\npi 3 1/4\nedge 0 1\nedge 0 2\nedge 0 3\n";
const Z: &str = "--allow-zero-mass";

#[test]
fn reduce_then_oracle_gives_beta_on_yes_instance() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let g = g.to_str().unwrap();
    let out = run(&["reduce", "--p", "1,1,2", "--beta", "2", "--target", "lambda", "--emit", g]);
    assert!(out.status.success());
    let v = json_of(&run(&["lambda-inf", "--graph", g, "--method", "oracle", "--json"]));
    assert_eq!(v["status"], "exact");
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(v["lower_bound"].as_f64().unwrap() <= v["value"].as_f64().unwrap());
    assert_eq!(v["witness"].as_array().unwrap().len(), 4);
}

#[test]
fn star_fptas_reports_approx() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "s.txt", "vertices 4\npi 0 1/2\npi 1 1/6\npi 2 1/6\npi 3 1/6\nedge 0 1\nedge 0 2\nedge 0 3\n");
    let v = json_of(&run(&["lambda-inf", "--graph", &g, "--method", "star-fptas", "--eps", "0.01", "--json"]));
    assert_eq!(v["status"], "approx");
    let exact = json_of(&run(&["lambda-inf", "--graph", &g, "--method", "star-closed", "--json"]));
    let (a, e) = (v["value"].as_f64().unwrap(), exact["value"].as_f64().unwrap());
    assert!(a >= e - 1e-12 && a <= 1.01 * e);
    assert!(e >= 2.0 + 1.0 / 54.0);
}

#[test]
fn spread_methods_agree_on_claw() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "claw.txt", CLAW);
    let abs = json_of(&run(&["spread", "--graph", &g, "--method", "abs-oracle", Z, "--json"]));
    let star = json_of(&run(&["spread", "--graph", &g, "--method", "star-exact", Z, "--json"]));
    assert_eq!(abs["value_exact"], "8/9");
    assert_eq!(star["value_exact"], "8/9");
    let tree = json_of(&run(&["spread", "--graph", &g, "--method", "tree-fptas", "--eps", "0.001", Z, "--json"]));
    let t = tree["value"].as_f64().unwrap();
    assert!((8.0 / 9.0 / 1.001..=8.0 / 9.0 + 1e-12).contains(&t));
}

#[test]
fn mve2_writes_embedding() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "claw.txt", CLAW);
    let e = dir.path().join("e.json");
    let v = json_of(&run(&["mve2", "--graph", &g, "--embed-out", e.to_str().unwrap(), Z, "--json"]));
    assert!((v["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let emb: Value = serde_json::from_str(&std::fs::read_to_string(&e).unwrap()).unwrap();
    assert_eq!(emb["n"], 4);
    assert_eq!(emb["k"], 2);
}

#[test]
fn lift_and_round_pipeline_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "claw.txt", CLAW);
    let l = dir.path().join("lift.json");
    let l = l.to_str().unwrap();
    let v = json_of(&run(&["lift", "--graph", &g, "--tol", "1e-6", "--out", l, Z, "--json"]));
    assert_eq!(v["converged"], true);
    assert!((v["objective"].as_f64().unwrap() - 1.0).abs() < 1e-3);
    let args = ["round", "--lift", l, "--k", "2", "--seed", "7", "--trials", "50", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["trials"]["count"], 50);
    let pca = json_of(&run(&["round", "--lift", l, "--k", "1", "--method", "pca", "--json"]));
    assert!(pca["var_ratio"].as_f64().unwrap() <= 1.0 + 1e-9);
}

#[test]
fn seed_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "claw.txt", CLAW);
    let l = dir.path().join("lift.json");
    let l = l.to_str().unwrap();
    assert!(run(&["lift", "--graph", &g, "--out", l, Z]).status.success());
    let missing = run(&["round", "--lift", l, "--k", "1"]);
    assert_eq!(missing.status.code(), Some(2));
    let env = bin().args(["round", "--lift", l, "--k", "1", "--json"]).env("SPREAD_SEED", "11").output().unwrap();
    let flag = run(&["round", "--lift", l, "--k", "1", "--seed", "11", "--json"]);
    assert_eq!(json_of(&env), json_of(&flag));
}

#[test]
fn vexp_methods_agree() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "s4.txt", S4);
    let mut values = Vec::new();
    for m in ["brute", "tree-dp", "star"] {
        let v = json_of(&run(&["vexp", "--graph", &g, "--method", m, "--json"]));
        values.push((v["value_exact"].clone(), v["witness"].clone()));
    }
    assert_eq!(values[0].0, "3/2");
    assert!(values.iter().all(|x| x.0 == values[0].0));
    assert_eq!(values[0].1, values[2].1);
}

#[test]
fn gapcheck_reports_exact_gap() {
    let v = json_of(&run(&["gapcheck", "--p", "1,1,1", "--beta", "2", "--target", "lambda", "--json"]));
    assert_eq!(v["partition"], false);
    assert_eq!(v["agrees"], true);
    assert_eq!(v["predicted_gap"], "1/54");
    assert!(v["observed_gap"].as_f64().unwrap() >= 1.0 / 54.0);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "vertices 2\npi 0 1/2\npi 1 1/3\nedge 0 1\n");
    let out = run(&["lambda-inf", "--graph", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let zero = write(dir.path(), "z.txt", "vertices 3\npi 0 0\npi 1 1/2\npi 2 1/2\nedge 0 1\nedge 0 2\n");
    assert_eq!(run(&["spread", "--graph", &zero]).status.code(), Some(2));
    assert!(run(&["spread", "--graph", &zero, "--allow-zero-mass"]).status.success());
    assert_eq!(run(&["reduce", "--p", "1,x", "--beta", "2", "--target", "lambda"]).status.code(), Some(2));
    assert_eq!(run(&["vexp", "--graph", "/nonexistent/file"]).status.code(), Some(2));
}

#[test]
fn accuracy_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "claw.txt", CLAW);
    let out = run(&["lift", "--graph", &g, "--max-iters", "3", Z]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn selftest_passes_and_mutations_fail() {
    assert!(run(&["selftest"]).status.success());
    let out = run(&["selftest", "--only", "rounding", "--tau-scale", "0.1"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL rounding"));
    let out = run(&["selftest", "--only", "lambda-fptas", "--fptas-grid", "1e-4"]);
    assert!(!out.status.success());
}

#[test]
fn json_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "s4.txt", S4);
    for args in [
        vec!["lambda-inf", "--graph", &g, "--json"],
        vec!["spread", "--graph", &g, "--method", "tree-fptas", "--json"],
        vec!["vexp", "--graph", &g, "--json"],
        vec!["selftest", "--only", "objectives,vexp", "--json"],
    ] {
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
}
