//! End-to-end binary tests: exit codes, report structure, determinism, and
//! the embedded tables.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_snscharts"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary must launch")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout must be UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr must be UTF-8")
}

/// Materialize an embedded fixture as a temporary file.
fn fixture_file(name: &str) -> PathBuf {
    let content = snscharts::fixtures::fixture(name).expect("fixture exists");
    let path = std::env::temp_dir().join(format!("snscharts-cli-test-{}-{name}", std::process::id()));
    fs::write(&path, content).unwrap();
    path
}

#[test]
fn help_and_version_exit_zero() {
    assert!(run(&["--help"]).status.success());
    assert!(run(&["--version"]).status.success());
    assert!(run(&["run", "--help"]).status.success());
}

#[test]
fn unknown_flag_is_a_configuration_error() {
    let out = run(&["run", "missing.csv", "--pipeline", "location_sns", "--bogus"]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&["run", "missing.csv", "--pipeline", "not_a_pipeline"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn missing_input_is_a_data_error() {
    let out = run(&["run", "/nonexistent/input.csv", "--pipeline", "location_sns"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("data error"));
}

#[test]
fn malformed_cell_is_a_data_error_with_location() {
    let path = std::env::temp_dir().join(format!("snscharts-cli-bad-{}.csv", std::process::id()));
    fs::write(&path, "batch,x1,x2\n1,0.5,0.7\n2,oops,0.1\n").unwrap();
    let out = run(&["run", path.to_str().unwrap(), "--pipeline", "location_sns"]);
    assert_eq!(out.status.code(), Some(4));
    let msg = stderr(&out);
    // Rows are reported in file coordinates (the header is row 1).
    assert!(msg.contains("\"oops\"") && msg.contains("row 3"), "error must locate the cell: {msg}");
    fs::remove_file(&path).ok();
}

#[test]
fn untabulated_chart_parameters_are_a_configuration_error() {
    let input = fixture_file("table_3_4.csv");
    let out = run(&[
        "run",
        input.to_str().unwrap(),
        "--pipeline",
        "location_sns",
        "--chart",
        "cusum",
        "--k",
        "0.3",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("configuration error"));
}

#[test]
fn cusum_run_reports_signals_and_change_point() {
    let input = fixture_file("table_3_4.csv");
    let out = run(&[
        "run",
        input.to_str().unwrap(),
        "--pipeline",
        "location_sns",
        "--chart",
        "cusum",
        "--k",
        "0.5",
        "--arl",
        "500",
        "--changepoint",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("JSON report");
    let signals = report["result"]["signals"].as_array().unwrap();
    assert_eq!(signals[0]["batch_index"], 22);
    assert_eq!(report["change_point"]["estimate"], 21);
    assert_eq!(report["signaled"], true);
}

#[test]
fn signal_exit_code_is_opt_in() {
    let input = fixture_file("table_3_4.csv");
    let base = [
        "run",
        "--pipeline",
        "location_sns",
        "--chart",
        "cusum",
        "--k",
        "0.5",
        "--arl",
        "500",
    ];
    let mut with_flag: Vec<&str> = base.to_vec();
    with_flag.insert(1, input.to_str().unwrap());
    let quiet = run(&with_flag);
    assert_eq!(quiet.status.code(), Some(0));
    with_flag.push("--signal-exit-code");
    let loud = run(&with_flag);
    assert_eq!(loud.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let input = fixture_file("table_5_5.csv");
    let args = [
        "run",
        input.to_str().unwrap(),
        "--pipeline",
        "conditional",
        "--theta",
        "0",
        "--p-theta",
        "0.5",
        "--chart",
        "cusum",
        "--k",
        "0.75",
        "--upper",
        "1.083",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn csv_output_has_the_series_shape() {
    let input = fixture_file("table_3_4.csv");
    let out = run(&[
        "run",
        input.to_str().unwrap(),
        "--pipeline",
        "location_sns",
        "--chart",
        "ewma",
        "--lambda",
        "0.1",
        "--arl",
        "500",
        "--csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "index,statistic,c_plus,c_minus,ewma,signal"
    );
    assert_eq!(lines.count(), 30, "one row per charted batch");
}

#[test]
fn tables_print_published_bounds() {
    let out = run(&["tables", "2.2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("4.095"), "ARL 370, k = 0.5 bound: {text}");
    assert!(text.contains("4.389"), "ARL 500, k = 0.5 bound");

    let out = run(&["tables", "2.7"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("1.204"));
    assert!(text.contains("0.804"));

    let out = run(&["tables", "9.9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn verify_subcommand_passes() {
    let out = run(&["verify"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("pass"));
    assert!(!text.contains("FAIL"));
    let json = run(&["verify", "--json"]);
    assert!(json.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert!(v.as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn changepoint_subcommand_scans_a_series() {
    let path = std::env::temp_dir().join(format!("snscharts-cli-cp-{}.csv", std::process::id()));
    fs::write(
        &path,
        "index,z\n1,0.0\n2,0.1\n3,-0.1\n4,2.0\n5,2.2\n6,1.9\n",
    )
    .unwrap();
    let out = run(&[
        "changepoint",
        path.to_str().unwrap(),
        "--signal",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["estimate"], 4);
    // A signal index beyond the series is a data problem.
    let bad = run(&["changepoint", path.to_str().unwrap(), "--signal", "99"]);
    assert_eq!(bad.status.code(), Some(4));
    fs::remove_file(&path).ok();
}
