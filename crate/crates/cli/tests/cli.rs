//! End-to-end runs of the `sphere-certify` binary.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_sphere-certify"));
    c.env_remove("SPHERE_CERTIFY_OUT");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture(name: &str) -> String {
    format!("{}/../core/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn leaf_file(out: &Path) -> std::path::PathBuf {
    out.join("domain2").join("domain2_1.txt")
}

#[test]
fn selftest_passes() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).trim_end().ends_with("selftest passed"));
}

#[test]
fn selftest_reports_json() {
    let o = run(&["selftest", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["passed"], true);
    assert!(v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "spot-leaf"));
}

#[test]
fn selftest_with_a_broken_configuration_fails() {
    let o = run(&["selftest", "--eps", "1", "--methods", "pointc"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("selftest FAILED"));
    let o = run(&["selftest", "--eps", "-1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_with_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--region", "3"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--region", "all", "--index", "1"]).status.code(), Some(1));
    assert_eq!(run(&["verify", "--region", "2", "--methods", "bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn expressions_evaluate_over_boxes() {
    let o = run(&["expr", "eval", "(x+1)^2", "--box", "[[1, 2]]", "--vars", "x"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "[4, 9]");
    // Transcendental values are enclosed outwardly.
    let o = run(&["expr", "eval", "cos(x)", "--box", "[[0, 0]]", "--digits", "10"]);
    assert_eq!(stdout(&o).trim(), "[9999999999/10000000000, 1]");
    let o = run(&["expr", "eval", "x*y", "--box", "[[1, 2], [-1, 3]]"]);
    assert_eq!(stdout(&o).trim(), "[-2, 6]");
    let o = run(&["expr", "eval", "x+", "--box", "[[0, 1]]"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["expr", "eval", "x*y", "--box", "[[1, 2]]"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn matrix_fixtures_are_decided() {
    let o = run(&["matrix", &fixture("bipyramid_hessian.txt"), "--query", "negdef", "--method", "vertex"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).trim().ends_with("true"));
    let o = run(&["matrix", &fixture("pyramid_hessian.txt"), "--query", "nonnegsemidef", "--method", "eigenvalue"]);
    assert!(stdout(&o).trim().ends_with("true"), "{}", stdout(&o));
    let o = run(&["matrix", "/nonexistent/matrix.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/matrix.txt"));
}

#[test]
fn model_dump_lists_the_model() {
    let o = run(&["model", "dump"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("distances: 10"));
    assert!(s.contains("gradient entries: 7"));
    assert!(s.contains("Hessian entries (upper triangle): 28"));
    assert!(s.contains("fmax_lo ="));
}

#[test]
fn verify_writes_traces_that_report_reads() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["verify", "--region", "2", "--index", "1", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("domain 2/1: 1/1 leaves certified, unchecked=0"));
    assert!(leaf_file(dir.path()).is_file());

    let o = run(&["report", out]);
    assert_eq!(o.status.code(), Some(2));
    let s = stdout(&o);
    assert!(s.contains("region 2: 1/2187 leaves certified"));
    assert!(s.contains("INCOMPLETE: region 1 missing 45907 leaves"), "{s}");

    let o = run(&["report", out, "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["certified"], false);
    assert_eq!(v["regions"][1]["certified"], 1);
}

#[test]
fn the_output_directory_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        bin().args(["verify", "--region", "2", "--index", "1"]).env("SPHERE_CERTIFY_OUT", dir.path()).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(leaf_file(dir.path()).is_file());
    let o = bin().arg("report").env("SPHERE_CERTIFY_OUT", dir.path()).output().unwrap();
    assert!(stdout(&o).contains("region 2: 1/2187 leaves certified"));
}

#[test]
fn a_degraded_run_is_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["verify", "--region", "2", "--index", "1", "--eps", "1", "--methods", "pointc", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2/1 FAIL"));
}

#[test]
fn a_corrupted_trace_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    assert_eq!(run(&["verify", "--region", "2", "--index", "1", "--out", out]).status.code(), Some(0));
    let file = leaf_file(dir.path());
    std::fs::write(&file, "not a trace\n").unwrap();
    let o = run(&["report", out]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains(&file.display().to_string()), "{}", stderr(&o));
}

#[test]
fn an_empty_directory_is_incomplete() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["report", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("INCOMPLETE: region 1 missing 45907 leaves, region 2 missing 2187 leaves"));
}

/// The lower corner of region 2, which lies in its first leaf.
const CORNER: &str = "-282944257/200000000,-1570796327/1000000000,0,0,-1570796327/500000000,-1570796327/1000000000,0";

#[test]
fn points_are_located_and_replayed() {
    let o = run(&["locate", CORNER]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "2/1");
    let o = run(&["locate", "1,2,3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("expected 7 coordinates"));

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["replay", CORNER, "--out", out]);
    assert_eq!(o.status.code(), Some(1), "replay without traces");
    assert_eq!(run(&["verify", "--region", "2", "--index", "1", "--out", out]).status.code(), Some(0));
    let o = run(&["replay", CORNER, "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("leaf: 2/1"));
}
