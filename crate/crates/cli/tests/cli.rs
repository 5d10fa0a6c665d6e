use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn trl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trl"))
        .args(args)
        .output()
        .expect("failed to run trl")
}

fn run(args: &[&str]) -> (i32, String) {
    let out = trl(args);
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).unwrap())
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap_or_else(|e| panic!("bad json ({e}): {text}"))
}

fn temp_model(name: &str, text: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("trl-cli-{}-{name}.model", std::process::id()));
    std::fs::write(&p, text).unwrap();
    p
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn model_check_reports_cohomology() {
    let m = data("models/borel_s3s3s7.model");
    let (code, out) = run(&["model-check", path(&m), "--max-degree", "14"]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["d_squared_zero"], true);
    assert_eq!(v["elliptic"], true);
    let dims = v["cohomology"]["dims"].as_object().unwrap();
    let total: u64 = dims.values().map(|d| d.as_u64().unwrap()).sum();
    assert_eq!(total, 16);
}

#[test]
fn broken_differential_is_an_input_error() {
    let m = temp_model(
        "broken",
        "generator x 3\ngenerator y 3\ngenerator c 3\ngenerator z 5\ngenerator w 7\nd z = x*y\nd w = c*z\n",
    );
    let out = trl(&["model-check", path(&m)]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("squares to a nonzero"), "{err}");
}

#[test]
fn rank_of_odd_spheres_is_exact() {
    let (code, out) = run(&["rank", path(&data("models/s3s3s7.model"))]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["lower"], 3);
    assert_eq!(v["upper"], 3);
    assert_eq!(v["exact"], true);
}

#[test]
fn rank_rejects_non_elliptic_models() {
    let m = temp_model("free", "generator x 2\n");
    let (code, out) = run(&["rank", path(&m)]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["elliptic"], false);
}

#[test]
fn rank_reports_budget_exhaustion() {
    let (code, out) = run(&["rank", path(&data("models/x2.model")), "--max-r", "4", "--budget", "1"]);
    assert_eq!(code, 3);
    assert_eq!(json(&out)["budget_exhausted"], true);
}

#[test]
fn rank_rejects_bad_coefficients() {
    let (code, _) = run(&["rank", path(&data("models/s3s3.model")), "--coeff-set", "1,x"]);
    assert_eq!(code, 1);
}

#[test]
fn diagram_formats() {
    let lib = data("witnesses/five_gen/library.toml");
    let (code, out) = run(&["diagram", path(&lib)]);
    assert_eq!(code, 0);
    let v = json(&out);
    assert_eq!(v["points"].as_array().unwrap().len(), 7);
    assert_eq!(v["edges"].as_array().unwrap().len(), 7);
    assert_eq!(v["admissibility"]["ok"], true);

    let (code, tsv) = run(&["diagram", path(&lib), "--format", "tsv"]);
    assert_eq!(code, 0);
    assert_eq!(tsv.lines().count(), 8);
    let (code, dot) = run(&["diagram", path(&lib), "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(dot.contains("--"));
}

#[test]
fn enumerate_counts() {
    let (code, out) = run(&["enumerate", "--rank", "3"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["count"], 8);
    let (code, tsv) = run(&["enumerate", "--rank", "2", "--format", "tsv"]);
    assert_eq!(code, 0);
    assert_eq!(tsv.lines().count(), 3);
    assert_eq!(run(&["enumerate", "--rank", "0"]).0, 1);
}

#[test]
fn embed_and_reject() {
    let (code, out) = run(&["embed", path(&data("graphs/two_paths_b.json")), "--format", "tsv"]);
    assert_eq!(code, 0);
    assert!(out.contains("A\t2\t1"), "{out}");
    let (code, out) = run(&["embed", path(&data("graphs/two_paths_f.json"))]);
    assert_eq!(code, 2);
    assert_eq!(json(&out)["rejected"]["condition"], 0);
}

#[test]
fn iso_compares_based_graphs() {
    let (code, out) = run(&["iso", path(&data("graphs/path_a.json")), path(&data("graphs/path_e.json"))]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["isomorphic"], true);
    let (_, out) = run(&["iso", path(&data("graphs/two_paths_a.json")), path(&data("graphs/two_paths_b.json"))]);
    assert_eq!(json(&out)["isomorphic"], false);
}

#[test]
fn leaves_exit_codes() {
    let square = ["--square", "0,0", "1,1", "2,2", "2,1"];
    let x1 = data("witnesses/x1/library.toml");
    let mut args = vec!["leaves", path(&x1)];
    args.extend(square);
    let (code, out) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["found"], true);

    let x2 = data("witnesses/x2/library.toml");
    let mut args = vec!["leaves", path(&x2)];
    args.extend(square);
    assert_eq!(run(&args).0, 3);
}

#[test]
fn timings_go_to_stderr() {
    let out = trl(&["--timings", "enumerate", "--rank", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stderr).unwrap().contains("elapsed_ms"));
    json(&String::from_utf8(out.stdout).unwrap());
}

#[test]
fn missing_input_is_an_error() {
    let (code, _) = run(&["model-check", "/nonexistent/model"]);
    assert_eq!(code, 1);
}
