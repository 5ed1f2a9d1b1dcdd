use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use minimax_lr::problem::examples::{scalar_example, tie_example};
use minimax_lr::{DMatrix, DVector, Horizon, ProblemSpec};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_minimax-lr"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

fn save(dir: &TempDir, name: &str, spec: &ProblemSpec) -> PathBuf {
    let path = dir.path().join(name);
    spec.save(&path).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_the_tie_example() {
    let dir = TempDir::new().unwrap();
    let file = save(&dir, "ex1.json", &tie_example(Horizon::Finite(10.0)));
    let out = run(&["validate", s(&file)]);
    assert_eq!(out.status.code(), Some(0));
    let report = stdout_json(&out);
    assert_eq!(report["metzler_ok"], true);
    assert_eq!(report["cost_margin"], serde_json::json!([1.0, 1.0, 1.0]));
}

#[test]
fn validate_rejects_zero_control_row() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"A": [[-1.0]], "B": [[1.0]], "E": [[0.0]], "s": [1.0], "r": [0.0], "x0": [1.0], "horizon": "infinite"}"#,
    )
    .unwrap();
    let out = run(&["validate", s(&path)]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "ZeroControlRow");
    assert_eq!(err["class"], "validation");
}

#[test]
fn failing_gate_exits_one_with_report() {
    let dir = TempDir::new().unwrap();
    let spec = ProblemSpec::builder(
        DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, -1.0]),
        DMatrix::from_column_slice(2, 1, &[1.0, 1.0]),
        DMatrix::from_row_slice(1, 2, &[1.0, 0.0]),
        DVector::from_element(2, 1.0),
        DVector::zeros(1),
    )
    .build()
    .unwrap();
    let file = save(&dir, "nm.json", &spec);
    let out = run(&["validate", s(&file)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["metzler_ok"], false);
}

#[test]
fn missing_file_is_an_io_error() {
    let out = run(&["validate", "/nonexistent/problem.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["class"], "io");
}

#[test]
fn bad_arguments_report_json() {
    let out = run(&["solve", "infinite", "x.json", "--method", "simplex"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "InvalidArgument");
}

#[test]
fn both_methods_agree_on_the_scalar_problem() {
    let dir = TempDir::new().unwrap();
    let file = save(&dir, "scalar.json", &scalar_example(Horizon::Infinite));
    let out = run(&["solve", "infinite", s(&file), "--method", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["vi"]["p"][0].as_f64().unwrap() - 1.0).abs() <= 1e-8);
    assert!((v["lp"]["primal"]["p"][0].as_f64().unwrap() - 1.0).abs() <= 1e-8);
    assert!(v["agreement"]["max_gap"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["vi"]["candidates"][0]["hurwitz"], true);
    assert_eq!(v["vi"]["candidates"][0]["detectable"], true);
}

#[test]
fn value_iteration_trace_is_written() {
    let dir = TempDir::new().unwrap();
    let file = save(&dir, "scalar.json", &scalar_example(Horizon::Infinite));
    let trace = dir.path().join("trace.csv");
    let out = run(&["solve", "infinite", s(&file), "--h", "30", "--trace", s(&trace)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["vi"]["h"], 30.0);
    let text = std::fs::read_to_string(trace).unwrap();
    assert!(text.starts_with("k,p_norm,step_norm"));
    assert!(text.lines().count() > 2);
}

#[test]
fn finite_solve_writes_trajectory_and_schedule() {
    let dir = TempDir::new().unwrap();
    let file = save(&dir, "ex1.json", &tie_example(Horizon::Finite(10.0)));
    let out_dir = dir.path().join("out");
    let out = run(&["solve", "finite", s(&file), "--steps", "10000", "--out-dir", s(&out_dir)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let expected = 3.0 * (1.0 - (-10.0f64).exp());
    assert!((v["value"].as_f64().unwrap() - expected).abs() <= 1e-6);
    let traj = std::fs::read_to_string(out_dir.join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,p_1,p_2,p_3\n"));
    assert_eq!(traj.lines().count(), 10_002);
    let gains = std::fs::read_to_string(out_dir.join("gain_schedule.csv")).unwrap();
    assert!(gains.starts_with("t,sigma_1,sigma_2,tie_1,tie_2\n"));
}

#[test]
fn lp_method_rejects_bounded_disturbance() {
    let dir = TempDir::new().unwrap();
    let water = dir.path().join("water.json");
    let out = run(&["gen", "water", "--n", "5", "-o", s(&water)]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["solve", "infinite", s(&water), "--method", "lp"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "ModelMismatch");
}

#[test]
fn generated_network_validates() {
    let out = run(&["gen", "water", "--n", "6", "--rain", "--gamma", "2", "--T", "24"]);
    assert_eq!(out.status.code(), Some(0));
    let spec = ProblemSpec::from_json(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(spec.n(), 6);
    assert_eq!(spec.l(), 1);
    assert_eq!(spec.horizon(), Horizon::Finite(24.0));
    assert!(minimax_lr::problem::validate(&spec).unwrap().passed());
    let bad = run(&["gen", "water", "--n", "4", "--rho-u", "0.1"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stderr_json(&bad)["error"], "InvariantViolation");
}

#[test]
fn analyze_and_simulate_with_a_controller_file() {
    let dir = TempDir::new().unwrap();
    let file = save(&dir, "ex1.json", &tie_example(Horizon::Infinite));
    let k = dir.path().join("k.json");
    std::fs::write(&k, r#"{"K": [[-1, -1, 0], [0, 0, 1]]}"#).unwrap();
    let out = run(&["analyze", s(&file), "--controller", s(&k)]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["certificate"]["hurwitz"], true);
    assert_eq!(v["certificate"]["detectable"], true);

    let csv = dir.path().join("sim.csv");
    let out = run(&[
        "simulate", s(&file), "--controller", s(&k), "--T", "40", "--steps", "40000", "--every", "100", "--out", s(&csv),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let cost = stdout_json(&out)["cost"].as_f64().unwrap();
    assert!((cost - 3.0).abs() <= 0.015);
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("t,x_1,x_2,x_3,J\n"));
    assert_eq!(text.lines().count(), 402);
}

#[test]
fn controller_outside_bounds_is_rejected() {
    let dir = TempDir::new().unwrap();
    let file = save(&dir, "ex1.json", &tie_example(Horizon::Infinite));
    let k = dir.path().join("k.json");
    std::fs::write(&k, "[[2, 0, 0], [0, 0, 1]]").unwrap();
    let out = run(&["analyze", s(&file), "--controller", s(&k)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "ControllerOutOfBounds");
}

#[test]
fn simulate_to_stdout_uses_the_optimal_schedule() {
    let dir = TempDir::new().unwrap();
    let file = save(&dir, "ex1.json", &tie_example(Horizon::Finite(5.0)));
    let out = run(&["simulate", s(&file), "--disturbance", "worst", "--every", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let last: Vec<f64> = text.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(last[0], 5.0);
    let expected = 3.0 * (1.0 - (-5.0f64).exp());
    assert!((last[4] - expected).abs() <= 1e-3 * expected);
}

#[test]
fn repro_example2_reports_the_unbounded_lp() {
    let out = run(&["repro", "example2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    let p: Vec<f64> = serde_json::from_value(v["p"].clone()).unwrap();
    assert!(p.iter().zip([1.0, 1.0, 0.0]).all(|(a, b)| (a - b).abs() <= 1e-9));
    assert_eq!(v["primal_status"], "unbounded");
    assert_eq!(v["unbounded_entries"], serde_json::json!([2]));
    assert_eq!(v["detectable"], false);
}

#[test]
fn repro_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = run(&["repro", "fig4", "--out-dir", s(dir.path())]);
    let first = std::fs::read(dir.path().join("fig4_closed_loop.csv")).unwrap();
    let b = run(&["repro", "fig4", "--out-dir", s(dir.path()), "--sequential"]);
    let second = std::fs::read(dir.path().join("fig4_closed_loop.csv")).unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(first, second);
    let header = String::from_utf8(first).unwrap().lines().next().unwrap().to_string();
    assert!(header.starts_with("t,x_1,") && header.ends_with(",x_100"));
}
