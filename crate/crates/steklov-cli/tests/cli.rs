use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steklov")).args(args).output().expect("spawn steklov")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).to_string_lossy().into_owned()
}

fn tmp(name: &str) -> String {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name).to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(stdout(o).trim()).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// the stderr line of a failed run
fn error(o: &Output) -> Value {
    let s = String::from_utf8(o.stderr.clone()).unwrap();
    assert_eq!(s.trim().lines().count(), 1, "{s}");
    serde_json::from_str(s.trim()).unwrap()
}

#[test]
fn oracle_cylinder_row_count() {
    let o = run(&["oracle", "cylinder", "--L", "1", "--beta", "0.3", "--kmax", "50"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,value,component"));
    assert_eq!(lines.count(), 202);
}

#[test]
fn recover_cylinder_round_trip() {
    let csv = tmp("cyl.csv");
    assert!(run(&["oracle", "cylinder", "--L", "1", "--beta", "0.3", "--kmax", "50", "--out", &csv]).status.success());
    let o = run(&["recover", &csv]);
    assert_eq!(o.status.code(), Some(0));
    let reports: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(reports.len(), 2);
    for r in &reports {
        // the short cylinder leaves e^{-|k|} corrections in the fit window
        assert!((r["length"].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-6);
        assert!((r["alpha"].as_f64().unwrap() - 0.3).abs() < 1e-6);
        assert_eq!(r["case"], "generic");
    }
    let o = run(&["recover", &csv, "--component", "tanh"]);
    assert_eq!(stdout(&o).lines().count(), 1);

    let csv = tmp("cyl150.csv");
    assert!(run(&["oracle", "cylinder", "--L", "1", "--beta", "0.3", "--kmax", "150", "--out", &csv]).status.success());
    let o = run(&["recover", &csv, "--multi", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let r = json(&o);
    assert_eq!(r["m"], 2);
}

#[test]
fn recover_exit_codes() {
    let csv = tmp("abdisk0.csv");
    assert!(run(&["oracle", "abdisk", "--beta", "0.5", "--kmax", "60", "--out", &csv]).status.success());
    // α = 1/2 with vanishing 1/n terms is flagged as degenerate
    let o = run(&["recover", &csv]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert_eq!(json(&o)["degenerate"], true);

    // a quadratic sequence is no ladder
    let mut text = String::from("index,value,component\n");
    for n in 1..=120 {
        text.push_str(&format!("{n},{},x\n", (n * n) as f64));
    }
    let csv = tmp("quadratic.csv");
    std::fs::write(&csv, text).unwrap();
    let o = run(&["recover", &csv]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(error(&o)["error"], "model_mismatch");
}

#[test]
fn forward_recover_round_trip() {
    let b = tmp("boundary.json");
    assert!(run(&["oracle", "boundary", "--seed", "11", "--out", &b]).status.success());
    let coeffs = tmp("coeffs.json");
    let csv = tmp("forward.csv");
    assert!(run(&["forward", &b, "--nrange", "200", "--coeffs", &coeffs, "--out", &csv]).status.success());
    let c: Value = serde_json::from_str(&std::fs::read_to_string(&coeffs).unwrap()).unwrap();
    let r = json(&run(&["recover", &csv]));
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
    assert!(rel(r["length"].as_f64().unwrap(), c[0]["length"].as_f64().unwrap()) < 1e-8);

    let o = run(&["coeffs", &b, "--depth", "5"]);
    let text = stdout(&o);
    assert!(text.starts_with("component,k,closed_plus,closed_minus,engine_plus,engine_minus,engine_only"));
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().nth(4).unwrap().ends_with(",true"));
    assert!(text.lines().nth(3).unwrap().ends_with(",false"));
}

#[test]
fn apdecide_verdicts() {
    let o = run(&["apdecide", &data("naturals.json"), &data("thirds.json")]);
    assert!(o.status.success());
    assert_eq!(json(&o)["verdict"], "equal_ae");
    let o = run(&["apdecide", &data("quarter.json"), &data("quarter_halves.json")]);
    assert_eq!(json(&o)["verdict"], "equal_ae");
    let o = run(&["apdecide", &data("quarter.json"), &data("naturals.json")]);
    assert_eq!(json(&o)["verdict"], "differ");
}

#[test]
fn cover_and_classify() {
    let r = json(&run(&["cover", &data("cover.json")]));
    assert_eq!((r["cs"].as_bool(), r["ecs"].as_bool(), r["dcs"].as_bool()), (Some(true), Some(true), Some(false)));
    let fams = json(&run(&["classify", "--k2", "2"]));
    assert!(fams.as_array().unwrap().len() >= 2);
}

#[test]
fn match_cylinders() {
    let (a, b) = (tmp("m1.csv"), tmp("m2.csv"));
    run(&["oracle", "cylinder", "--L", "1", "--beta", "0.3", "--kmax", "50", "--out", &a]);
    run(&["oracle", "cylinder", "--L", "1", "--beta", "0.1", "--kmax", "50", "--out", &b]);
    assert_eq!(json(&run(&["match", &a, &a]))["verdict"], "consistent");
    assert_eq!(json(&run(&["match", &a, &b]))["verdict"], "mismatch");
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        vec!["oracle", "boundary", "--seed", "3", "--components", "2"],
        vec!["oracle", "abdisk", "--beta", "0.2", "--kmax", "30"],
        vec!["classify", "--k2", "3"],
    ] {
        assert_eq!(run(&args).stdout, run(&args).stdout);
    }
    assert_ne!(run(&["oracle", "boundary", "--seed", "3"]).stdout, run(&["oracle", "boundary", "--seed", "4"]).stdout);
}

#[test]
fn errors_are_single_json_lines() {
    let o = run(&["recover", "/nonexistent/spectrum.csv"]);
    assert!(!o.status.success());
    assert_eq!(error(&o)["error"], "io");
    let o = run(&["oracle", "cylinder", "--L=-1", "--beta", "0.3"]);
    assert!(!o.status.success());
    assert!(error(&o)["message"].is_string());
    let o = run(&["recover"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(error(&o)["error"], "usage");
    let bad = tmp("bad.json");
    std::fs::write(&bad, "[{\"a\": \"0\", \"b\": \"1\"}]").unwrap();
    let o = run(&["apdecide", &bad, &bad]);
    assert!(!o.status.success());
    error(&o);
}

#[test]
fn help_documents_schemas() {
    let o = run(&["--help"]);
    let text = stdout(&o);
    for word in ["boundary JSON", "spectrum CSV", "multiset JSON", "relations JSON"] {
        assert!(text.contains(word), "{word}");
    }
}
