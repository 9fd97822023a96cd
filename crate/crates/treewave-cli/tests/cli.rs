//! Exit-code contract and output formats of the binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treewave"))
        .args(args)
        .output()
        .expect("binary should run")
}

fn run_stdin(args: &[&str], stdin: &str) -> Output {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_treewave"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary should spawn");
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn build_emits_json_and_dot() {
    let out = run(&["build", "-m", "2", "-H", "2", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["n"], 7);
    assert_eq!(doc["parents"].as_array().unwrap().len(), 7);

    let out = run(&["build", "-m", "2", "-H", "1", "--format", "dot"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("graph tree {"));
    assert!(text.contains("0 -- 1"));
}

#[test]
fn color_reports_count_and_verifies() {
    let out = run(&["color", "-m", "2", "-H", "3", "--verify"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "57 colors, proper\n");

    let out = run(&["color", "--family", "spider", "-k", "5", "-t", "2", "--verify"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "20 colors, proper\n");

    let out = run(&["color", "-m", "3", "-H", "2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("u,v,color\n"));
    // 78 paths plus the header
    assert_eq!(text.lines().count(), 79);
}

#[test]
fn invalid_parameters_exit_2() {
    assert_eq!(run(&["color", "-m", "0", "-H", "2"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--family", "spider", "-k", "0", "-t", "3"]).status.code(), Some(2));
    assert_eq!(run(&["build", "--family", "spider", "-k", "3", "-t", "0"]).status.code(), Some(2));
    assert_eq!(run(&["table", "--m-range", "4..1"]).status.code(), Some(2));
    assert_eq!(run(&["designs", "-n", "0"]).status.code(), Some(2));
}

#[test]
fn zero_height_prints_zero_colors() {
    let out = run(&["color", "-m", "3", "-H", "0"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("0 colors"));
}

#[test]
fn certify_reports_optimal() {
    let out = run(&["certify", "-m", "4", "-H", "2"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["optimal"], true);
    assert_eq!(doc["constructive"], 80);
    assert_eq!(doc["lower"], 80);
}

#[test]
fn oracle_reads_stdin_and_respects_budget() {
    let odd_cycle = r#"{"order":5,"edges":[[0,1],[1,2],[2,3],[3,4],[4,0]]}"#;
    let out = run_stdin(&["oracle"], odd_cycle);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["exact"], 3);

    let out = run_stdin(&["oracle"], r#"{"order":3,"edges":[[0,9]]}"#);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bounds_text_output() {
    let out = run(&["bounds", "-m", "3", "-H", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("edge_cut 36"));
    assert!(text.contains("vertex_cut 48"));
    assert!(text.contains("pi 36"));
}

#[test]
fn table_csv_has_grid_rows() {
    let out = run(&["table", "--m-range", "2..3", "--h-range", "1..2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().any(|l| l.starts_with("3,2,13,78,48,48,true")));
}
