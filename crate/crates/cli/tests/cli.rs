//! End-to-end tests of the `netmend` binary: exit codes, output formats, and
//! reproducibility, all on the built-in dataset.

use std::path::Path;
use std::process::{Command, Output};

use netmend_cli::row::ReportRow;

const BIN: &str = env!("CARGO_BIN_EXE_netmend");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn parse_rows(csv_text: &str) -> Vec<ReportRow> {
    csv::Reader::from_reader(csv_text.as_bytes())
        .deserialize()
        .collect::<Result<Vec<ReportRow>, _>>()
        .expect("rows should deserialize")
}

fn read_rows(path: &Path) -> Vec<ReportRow> {
    parse_rows(&std::fs::read_to_string(path).expect("row file should exist"))
}

/// Strips the one field that legitimately differs between identical runs.
fn without_wall_time(mut rows: Vec<ReportRow>) -> Vec<ReportRow> {
    for row in &mut rows {
        row.wall_time_s = 0.0;
    }
    rows
}

#[test]
fn missing_trips_file_exits_2_and_names_the_path() {
    let out = run(&["solve", "--trips", "/nonexistent/trips.txt"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("/nonexistent/trips.txt"));
}

#[test]
fn validate_accepts_the_builtin_dataset() {
    let out = run(&["validate"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    assert!(text.contains("24 zones"), "unexpected summary: {text}");
    assert!(text.contains("76 links"), "unexpected summary: {text}");
}

#[test]
fn solve_respects_the_budget_and_reports_ok() {
    let out = run(&["solve", "--solver", "greedy", "--budget", "75"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = parse_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(row.solver, "greedy");
    assert_eq!(row.status, "ok");
    assert!(row.cost <= 75.0 + 1e-6, "cost {} exceeds budget", row.cost);
    assert!((row.low + row.average + row.high - row.cost).abs() <= 1e-9);
}

#[test]
fn solve_is_bit_identical_for_a_fixed_seed() {
    let args = ["solve", "--solver", "sa", "--budget", "40", "--seed", "7"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(second.status.code(), Some(0));
    let a = without_wall_time(parse_rows(&stdout_of(&first)));
    let b = without_wall_time(parse_rows(&stdout_of(&second)));
    assert_eq!(a, b);
}

#[test]
fn sweep_emits_the_grid_in_canonical_order() {
    let out = run(&[
        "sweep", "--budgets", "40,80", "--mus", "0,1", "--solvers", "greedy", "--seeds", "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = parse_rows(&stdout_of(&out));
    assert_eq!(rows.len(), 4);
    let order: Vec<(f64, f64)> = rows.iter().map(|r| (r.budget, r.mu)).collect();
    assert_eq!(order, vec![(40.0, 0.0), (40.0, 1.0), (80.0, 0.0), (80.0, 1.0)]);
    for row in &rows {
        assert_eq!(row.status, "ok");
        if row.mu == 1.0 {
            assert_eq!(row.objective, row.deficiency, "mu=1 must reduce R to D");
        }
        if row.mu == 0.0 {
            assert_eq!(row.objective, row.equity, "mu=0 must reduce R to E");
        }
    }
}

#[test]
fn sweep_output_does_not_depend_on_job_count() {
    let dir = tempfile::tempdir().unwrap();
    let serial = dir.path().join("serial.csv");
    let parallel = dir.path().join("parallel.csv");
    let grid = [
        "sweep", "--budgets", "40,80", "--mus", "0,0.5,1", "--solvers", "greedy", "--seeds",
        "0,1",
    ];
    let mut one: Vec<&str> = grid.to_vec();
    one.extend(["--jobs", "1", "--out", serial.to_str().unwrap()]);
    let mut four: Vec<&str> = grid.to_vec();
    four.extend(["--jobs", "4", "--out", parallel.to_str().unwrap()]);
    assert_eq!(run(&one).status.code(), Some(0));
    assert_eq!(run(&four).status.code(), Some(0));
    let a = without_wall_time(read_rows(&serial));
    let b = without_wall_time(read_rows(&parallel));
    assert_eq!(a.len(), 12);
    assert_eq!(a, b);
}

#[test]
fn sweep_appends_to_an_existing_file_without_a_second_header() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.csv");
    let base = ["sweep", "--mus", "0.5", "--solvers", "greedy", "--seeds", "0", "--out"];
    let mut first: Vec<&str> = vec!["sweep", "--budgets", "40"];
    first.extend(&base[1..]);
    first.push(path.to_str().unwrap());
    let mut second: Vec<&str> = vec!["sweep", "--budgets", "80"];
    second.extend(&base[1..]);
    second.push(path.to_str().unwrap());
    assert_eq!(run(&first).status.code(), Some(0));
    assert_eq!(run(&second).status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.matches("solver,budget").count(), 1, "header must appear once");
    let rows = parse_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!((rows[0].budget, rows[1].budget), (40.0, 80.0));
}

#[test]
fn assign_solves_the_intact_equilibrium() {
    let out = run(&["assign", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert_eq!(summary["converged"], serde_json::Value::Bool(true));
    let total = summary["total_travel_time"].as_f64().unwrap();
    assert!((total - 2273.42).abs() < 0.5, "unexpected travel time {total}");
    assert!(summary["relative_gap"].as_f64().unwrap() <= 1e-4);
    assert!(summary["conservation_residual"].as_f64().unwrap() <= 1e-6);
    assert_eq!(summary["flows"].as_array().unwrap().len(), 76);
}

#[test]
fn assign_csv_lists_every_link() {
    let out = run(&["assign", "--damaged"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("link,from,to,capacity,flow,time"));
    assert_eq!(lines.count(), 76);
}

#[test]
fn report_requires_two_solvers() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    let out = run(&[
        "sweep", "--budgets", "40", "--mus", "0.5", "--solvers", "greedy", "--seeds", "0",
        "--out", path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = run(&["report", "--input", path.to_str().unwrap()]);
    assert_eq!(report.status.code(), Some(2));
    assert!(stderr_of(&report).contains("need two solvers"));
}

#[test]
fn report_compares_solvers_and_writes_plot_rows() {
    let dir = tempfile::tempdir().unwrap();
    let rows_path = dir.path().join("rows.csv");
    let plot_path = dir.path().join("plot.csv");
    let out = run(&[
        "sweep", "--budgets", "40", "--mus", "0.5", "--solvers", "greedy,sa", "--seeds", "0",
        "--out", rows_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report = run(&[
        "report", "--input", rows_path.to_str().unwrap(), "--plot-out",
        plot_path.to_str().unwrap(),
    ]);
    assert_eq!(report.status.code(), Some(0));
    let comparison = stdout_of(&report);
    let mut lines = comparison.lines();
    assert_eq!(
        lines.next(),
        Some("budget,solver,best_h,cost,wall_time_s,budget_utilization,utilization_flag")
    );
    assert_eq!(lines.count(), 2, "one comparison row per solver");
    let plot = std::fs::read_to_string(&plot_path).unwrap();
    assert!(plot.starts_with("variable,group,budget,value"));
    // per ok row: 3 capacity-split rows + 6 scalar rows
    assert_eq!(plot.lines().count(), 1 + 2 * 9);
}

#[test]
fn sa_trace_lands_in_the_requested_file() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let out = run(&[
        "solve", "--solver", "sa", "--budget", "40", "--seed", "5", "--trace-out",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("step,temperature,current_H,best_H"));
    assert!(lines.count() > 10, "trace should cover the cooling schedule");
}

#[test]
fn cqm_without_an_endpoint_is_a_usage_error() {
    let out = run(&["solve", "--solver", "cqm"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr_of(&out);
    assert!(err.contains("--cqm-endpoint"), "unexpected stderr: {err}");
    assert!(err.contains("NETMEND_CQM_TOKEN"), "unexpected stderr: {err}");
}

#[test]
fn oracle_refuses_an_intractable_grid() {
    let out = run(&["solve", "--solver", "oracle"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("search space too large"));
}

#[test]
fn unknown_solver_is_rejected_by_the_parser() {
    let out = run(&["solve", "--solver", "quantum"]);
    assert_eq!(out.status.code(), Some(2));
}
