//! Report plumbing: determinism, exit codes, output routing, and the small
//! golden commands.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn binary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multirees"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn parse_lines(output: &Output) -> Vec<Value> {
    String::from_utf8(output.stdout.clone())
        .expect("reports are UTF-8")
        .lines()
        .map(|l| serde_json::from_str(l).expect("reports are JSON lines"))
        .collect()
}

fn temp_job(name: &str, content: &Value) -> PathBuf {
    let path = std::env::temp_dir().join(format!("mr_{}_{}.json", name, std::process::id()));
    std::fs::write(&path, content.to_string()).expect("temp job writes");
    path
}

#[test]
fn repeated_runs_are_byte_identical() {
    let first = binary(&["example41"]);
    let second = binary(&["example41"]);
    let third = binary(&["example41", "--threads", "1"]);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.stdout, third.stdout, "thread count must not leak into the report");
}

#[test]
fn first_line_echoes_the_resolved_job() {
    let output = binary(&["example41"]);
    let lines = parse_lines(&output);
    assert_eq!(lines[0]["check"], "spec");
    assert_eq!(lines[0]["params"]["command"], "example41");
    assert_eq!(lines[0]["data"]["cutters"], json!(["u", "v"]));
    assert_eq!(lines[0]["data"]["seed"], 2026);
    assert_eq!(lines[0]["data"]["window"], json!({ "N": 6, "W": [6, 6] }));
}

#[test]
fn report_can_be_routed_to_a_file() {
    let out = std::env::temp_dir().join(format!("mr_out_{}.jsonl", std::process::id()));
    let routed = binary(&["example41", "--out", out.to_str().unwrap()]);
    assert_eq!(routed.status.code(), Some(0));
    assert!(routed.stdout.is_empty());
    let direct = binary(&["example41"]);
    let written = std::fs::read(&out).expect("report file exists");
    std::fs::remove_file(&out).ok();
    assert_eq!(written, direct.stdout);
}

#[test]
fn missing_job_file_is_an_input_error() {
    let output = binary(&["gb"]);
    assert_eq!(output.status.code(), Some(2));
    let output = binary(&["gb", "--job", "/nonexistent/job.json"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn polynomial_parse_errors_carry_line_and_column() {
    let path = temp_job(
        "badpoly",
        &json!({
            "ring": { "vars": ["x", "y"] },
            "relations": ["x^2 + q*y"],
        }),
    );
    let output = binary(&["gb", "--job", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(output.status.code(), Some(2));
    let message = String::from_utf8(output.stderr).unwrap();
    assert!(message.contains("line 1"), "missing position: {message}");
    assert!(message.contains("column"), "missing position: {message}");
}

#[test]
fn exhausted_budget_uses_its_own_exit_code() {
    let output = binary(&["example41", "--budget-cells", "100"]);
    assert_eq!(output.status.code(), Some(3));
    let message = String::from_utf8(output.stderr).unwrap();
    assert!(message.contains("budget"), "unexpected stderr: {message}");
}

#[test]
fn empty_relation_list_gives_the_zero_ideal() {
    let path = temp_job(
        "zeroideal",
        &json!({
            "ring": { "vars": ["x", "y"] },
            "relations": [],
        }),
    );
    let output = binary(&["gb", "--job", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(output.status.code(), Some(0));
    let lines = parse_lines(&output);
    assert_eq!(lines[1]["data"]["basis"], json!([]));
}

#[test]
fn basis_of_the_plane_pair_includes_the_cubic() {
    let path = temp_job(
        "planepair",
        &json!({
            "ring": { "vars": ["x", "y"] },
            "relations": ["x^2", "x*y + y^2"],
        }),
    );
    let output = binary(&["gb", "--job", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    let lines = parse_lines(&output);
    let basis = lines[1]["data"]["basis"].as_array().unwrap();
    assert!(basis.contains(&json!("y^3")), "basis was {basis:?}");
}

#[test]
fn monomial_ideals_are_their_own_initial_ideal() {
    let path = temp_job(
        "monomial",
        &json!({
            "ring": { "vars": ["x", "y", "z"] },
            "relations": ["x*y", "z^2"],
            "weight": [3, 1, 2],
        }),
    );
    let output = binary(&["initial", "--job", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(output.status.code(), Some(0));
    let lines = parse_lines(&output);
    assert_eq!(lines[1]["data"]["generators"], json!(["x*y", "z^2"]));
}

#[test]
fn weight_vector_is_derived_from_the_first_alpha_when_absent() {
    let path = temp_job(
        "derived",
        &json!({
            "ring": { "vars": ["u", "v", "w", "x", "y", "z"] },
            "relations": ["u^3 - v^3 + u*w^2 + v*w^2 + x^3 + y^3 + y*z^2"],
            "cutters": ["u", "v"],
            "alphas": [[1, 2]],
        }),
    );
    let output = binary(&["initial", "--job", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(output.status.code(), Some(0));
    let lines = parse_lines(&output);
    assert_eq!(lines[0]["data"]["weight"], json!([1, 2, 0, 0, 0, 0]));
    assert_eq!(lines[1]["data"]["generators"], json!(["x^3 + y^3 + y*z^2"]));
}

#[test]
fn single_filtration_bookkeeping_is_the_identity() {
    let path = temp_job(
        "rankone",
        &json!({
            "ring": { "vars": ["x", "y"] },
            "relations": [],
            "cutters": ["x"],
            "alphas": [[1]],
            "window": { "N": 3, "W": [3] },
            "domain_degree": 1,
        }),
    );
    let output = binary(&["fiber", "--job", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(output.status.code(), Some(0));
    let lines = parse_lines(&output);
    let ledger = lines
        .iter()
        .find(|l| l["check"] == "bookkeeping")
        .expect("bookkeeping line");
    assert_eq!(ledger["verdict"], "clean");
    let table = lines
        .iter()
        .find(|l| l["check"] == "fiber_table")
        .expect("fiber table line");
    assert_eq!(table["data"]["totals"], json!([1, 2, 3, 4]));
}
