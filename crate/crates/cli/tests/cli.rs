use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_runsdist")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(path).unwrap()
}

fn assert_golden(args: &[&str], name: &str) {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(stdout(&out), golden(name), "output of {args:?} drifted from {name}");
}

/// Rows of a CSV document as maps from column name to field.
fn csv_rows(text: &str) -> Vec<std::collections::HashMap<String, String>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    reader
        .records()
        .map(|r| headers.iter().map(String::from).zip(r.unwrap().iter().map(String::from)).collect())
        .collect()
}

#[test]
fn pmf_exact_golden() {
    assert_golden(
        &["pmf", "--k", "2", "--r", "1", "--p", "1/2", "--n-min", "2", "--n-max", "5", "--engine", "recurrence-pg", "--scheme", "full", "--exact"],
        "pmf_exact.csv",
    );
}

#[test]
fn pmf_float_json_golden() {
    assert_golden(
        &["pmf", "--k", "3", "--r", "2", "--p", "0.4", "--n-min", "0", "--n-max", "3", "--engine", "nested-sum", "--scheme", "cut", "--format", "json"],
        "pmf_float.json",
    );
}

#[test]
fn moments_central_golden() {
    assert_golden(
        &["moments", "--k", "2", "--r", "1", "--p", "1/2", "--kind", "central", "--route", "partition"],
        "moments_central.csv",
    );
}

#[test]
fn compare_json_golden() {
    assert_golden(
        &["compare", "--k", "2", "--r", "1", "--p", "1/2", "--n-min", "2", "--n-max", "3", "--engines", "recurrence-pg,hyp,dp-oracle", "--format", "json"],
        "compare.json",
    );
}

#[test]
fn simulate_golden() {
    assert_golden(&["simulate", "--k", "2", "--r", "1", "--p", "1/2", "--samples", "1000", "--seed", "42"], "simulate.csv");
}

#[test]
fn type2_first_order_is_geometric() {
    let out = run(&["pmf", "--k", "1", "--r", "1", "--p", "0.5", "--n-min", "1", "--n-max", "1", "--engine", "muselli-alt", "--variant", "type2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["value"].parse::<f64>().unwrap(), 0.5);
}

#[test]
fn float_values_round_trip() {
    let out = run(&["pmf", "--k", "3", "--r", "2", "--p", "0.3", "--n-max", "40", "--engine", "recurrence-pg", "--format", "json"]);
    let records: Vec<serde_json::Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(records.len(), 41);
    for record in records {
        let text = record["value"].as_str().unwrap();
        let v: f64 = text.parse().unwrap();
        assert_eq!(format!("{v:.16e}"), text);
    }
}

#[test]
fn moments_mean_and_variance() {
    let out = run(&["moments", "--k", "2", "--r", "1", "--p", "1/2", "--kind", "factorial", "--order-max", "1", "--route", "partition", "--scheme", "full"]);
    assert_eq!(csv_rows(&stdout(&out))[0]["value"], "6");
    for route in ["recurrence", "partition"] {
        let out = run(&["moments", "--k", "2", "--r", "1", "--p", "1/2", "--kind", "central", "--order-max", "2", "--route", route]);
        assert_eq!(csv_rows(&stdout(&out))[1]["value"], "22", "{route}");
    }
    for route in ["pgf", "root", "summation"] {
        let out = run(&["moments", "--k", "2", "--r", "1", "--p", "0.5", "--kind", "central", "--order-max", "2", "--route", route]);
        let v: f64 = csv_rows(&stdout(&out))[1]["value"].parse().unwrap();
        assert!((v - 22.0).abs() < 1e-9, "{route}: {v}");
    }
}

#[test]
fn overlap_moments_by_root_match_summation() {
    let values = |route| {
        let out = run(&["moments", "--k", "3", "--r", "3", "--p", "0.6", "--variant", "overlap=1", "--route", route, "--order-max", "3"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        csv_rows(&stdout(&out)).iter().map(|r| r["value"].parse::<f64>().unwrap()).collect::<Vec<_>>()
    };
    for (a, b) in values("root").iter().zip(values("summation")) {
        assert!((a - b).abs() <= 1e-9 * b.abs(), "{a} vs {b}");
    }
}

#[test]
fn compare_type1_engines_pass() {
    let out = run(&["compare", "--k", "3", "--r", "2", "--p", "0.4", "--n-max", "100", "--engines", "type1", "--tolerance", "1e-11"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).starts_with("PASS"));
    assert_eq!(csv_rows(&stdout(&out)).len(), 101 * 7);
}

#[test]
fn compare_mismatched_schemes_fail() {
    let out = run(&["compare", "--k", "3", "--r", "2", "--p", "0.4", "--n-max", "30", "--engines", "recurrence-pg,recurrence-pg@cut"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("FAIL"));
}

#[test]
fn simulate_is_deterministic_and_near_analytic() {
    let args = ["simulate", "--k", "3", "--r", "2", "--p", "0.6", "--samples", "200000", "--seed", "11"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let row = &csv_rows(&stdout(&a))[0];
    let field = |name: &str| row[name].parse::<f64>().unwrap();
    assert!((field("mean") - field("analytic_mean")).abs() <= 5.0 * field("standard_error"));
}

#[test]
fn simulate_writes_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hist.csv");
    let out = run(&["simulate", "--k", "2", "--r", "1", "--p", "0.5", "--variant", "gap=2", "--samples", "5000", "--histogram", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("n,count\n"));
    let total: u64 = csv_rows(&text).iter().map(|r| r["count"].parse::<u64>().unwrap()).sum();
    assert_eq!(total, 5000);
}

#[test]
fn usage_errors_exit_2() {
    let cases: &[(&[&str], &str)] = &[
        (&["pmf", "--k", "2", "--r", "1", "--p", "0.5", "--n-max", "3", "--engine", "bogus"], "recurrence-pg"),
        (&["pmf", "--k", "2", "--r", "1", "--p", "1.5", "--n-max", "3"], "--p"),
        (&["pmf", "--k", "2", "--r", "1", "--p", "0.5", "--n-max", "3", "--variant", "overlap=2"], "--variant"),
        (&["pmf", "--k", "2", "--r", "1", "--p", "0.5", "--n-max", "3", "--engine", "hyp", "--variant", "type2"], "--engine"),
        (&["pmf", "--k", "2", "--r", "1", "--p", "1/2", "--n-max", "3", "--engine", "root-based"], "--engine"),
        (&["moments", "--k", "2", "--r", "1", "--p", "0.5", "--route", "pgf", "--variant", "type2"], "--route"),
        (&["moments", "--k", "2", "--r", "1", "--p", "0.5", "--kind", "central", "--order-max", "5"], "--order-max"),
        (&["compare", "--k", "2", "--r", "1", "--p", "0.5", "--n-max", "3", "--engines", "hyp"], "at least two engines"),
        (&["simulate", "--k", "2", "--r", "1", "--p", "0.5", "--samples", "0"], "--samples"),
    ];
    for (args, needle) in cases {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).contains(needle), "{args:?}: {}", stderr(&out));
    }
}
