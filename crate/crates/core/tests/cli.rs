use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn scorekit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scorekit"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SCOREKIT_THREADS")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: stdout {:?} stderr {:?}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn stderr_code(out: &Output) -> String {
    let v: Value = serde_json::from_slice(&out.stderr).unwrap();
    v["code"].as_str().unwrap().to_string()
}

#[test]
fn score_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = scorekit(&["score", "--density", "normal", "--at", "2"], dir.path());
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["phi"], -2.0);
    assert_eq!(v["psi"], -3.0);
    assert_eq!(v["source"], "analytic");
}

#[test]
fn score_grid_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = scorekit(
        &["score", "--density", "exponential", "--grid", "0.5:2:4", "--format", "csv"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,phi,psi,source");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[1], "0.5,-1.0,0.5,analytic");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = scorekit(&["score", "--density", "nope", "--at", "1"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "UNKNOWN_FAMILY");

    let out = scorekit(&["varbound", "--density", "exponential", "--g", "x^"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "PARSE");

    let out = scorekit(&["singular-pair", "--base", "exponential", "--c1", "1", "--c2", "2"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_code(&out), "DENSITY_NOT_SYMMETRIC");

    std::fs::write(dir.path().join("cauchy.toml"), "family = \"student_t\"\nparams = { nu = 1.0 }\n").unwrap();
    let out = scorekit(&["varbound", "--density", "cauchy.toml", "--g", "x"], dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));

    let out = scorekit(&["frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let out = scorekit(&["--help"], dir.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("score.toml");
    std::fs::write(&cfg, "command = \"score\"\ndensity = \"normal\"\nat = [1.0]\n").unwrap();
    let out = scorekit(&["score", "--config", "score.toml", "--at", "3"], dir.path());
    assert!(out.status.success());
    assert_eq!(json(&out)["phi"], -3.0);

    let out = scorekit(&["run", "--config", "score.toml"], dir.path());
    assert!(out.status.success());
    assert_eq!(json(&out)["phi"], -1.0);

    std::fs::write(&cfg, "command = \"score\"\ndensity = \"normal\"\nat = [1.0]\noutput = \"res/out.json\"\n").unwrap();
    let out = scorekit(&["run", "--config", "score.toml"], dir.path());
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/out.json")).unwrap()).unwrap();
    assert_eq!(written["psi"], 0.0);
}

#[test]
fn sample_then_goodness_of_fit() {
    let dir = tempfile::tempdir().unwrap();
    let a = scorekit(&["sample", "--density", "laplace", "--n", "5000", "--seed", "3", "-o", "s.csv"], dir.path());
    assert!(a.status.success());
    let b = scorekit(&["sample", "--density", "laplace", "--n", "5000", "--seed", "3"], dir.path());
    assert_eq!(std::fs::read(dir.path().join("s.csv")).unwrap(), b.stdout);

    let out = scorekit(&["stein-gof", "--density", "normal", "--sample", "s.csv", "--f", "x"], dir.path());
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["n"], 5000);
    assert!((v["per_function"][0]["value"].as_f64().unwrap() + 1.0).abs() < 0.15);
}

#[test]
fn analyses_report_expected_fields() {
    let dir = tempfile::tempdir().unwrap();
    let v = json(&scorekit(&["fisher", "--model", "skew-normal"], dir.path()));
    assert_eq!(v["rank"], 2);
    assert_eq!(v["singular"], true);
    assert_eq!(v["matrix"].as_array().unwrap().len(), 9);

    let v = json(&scorekit(
        &["mle-verify", "--density", "exponential", "--kind", "scale", "--trials", "10", "--seed", "1"],
        dir.path(),
    ));
    assert_eq!(v["failures"], 0);
    assert!(v["max_abs_gap"].as_f64().unwrap() < 1e-9);

    let v = json(&scorekit(&["mle-solve", "--density", "laplace", "--data", "0,1,5,-2"], dir.path()));
    assert_eq!(v["solution_interval"], serde_json::json!([0.0, 1.0]));
    assert_eq!(v["estimate"], 0.5);

    let v = json(&scorekit(&["cauchy-check", "--density", "laplace", "--pair", "1:1"], dir.path()));
    assert_eq!(v["max_residual"], 1.0);

    let v = json(&scorekit(&["stein-check", "--density", "exponential", "--operator", "exp_scale"], dir.path()));
    assert!(v["max_abs"].as_f64().unwrap() <= 1e-7);

    std::fs::write(dir.path().join("sq.toml"), "family = \"power\"\nof = \"normal\"\nc = 3.0\n").unwrap();
    let v = json(&scorekit(&["power-fit", "--density", "sq.toml", "--base", "normal"], dir.path()));
    assert!((v["c"].as_f64().unwrap() - 3.0).abs() < 1e-9);
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_scorekit"))
            .args(["mle-verify", "--density", "normal", "--trials", "30", "--seed", "9"])
            .current_dir(dir.path())
            .env("SCOREKIT_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run("0").status.code(), Some(1));
}

#[test]
fn reproduction_suite_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = scorekit(&["repro-emit", "--dir", "suite"], dir.path());
    assert!(out.status.success());
    let out = scorekit(&["repro-check", "--dir", "suite"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["passed"], true);

    // a tampered expectation fails the suite with exit code 1
    let manifest = dir.path().join("suite/manifest.toml");
    let text = std::fs::read_to_string(&manifest).unwrap().replacen("expected = -2.0", "expected = -2.5", 1);
    std::fs::write(&manifest, text).unwrap();
    let out = scorekit(&["repro-check", "--dir", "suite"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
