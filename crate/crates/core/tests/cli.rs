//! End-to-end runs of the `dparts` binary.

use std::process::{Command, Output};

use distinct_parts::asymptotics::compare_sweep;
use distinct_parts::exact_count::d_t;
use distinct_parts::BoundFactor;
use serde_json::Value;

fn dparts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dparts"))
        .args(args)
        .env_remove("DPARTS_WORK_BUDGET")
        .output()
        .expect("binary runs")
}

#[test]
fn count_row_matches_library() {
    let out = dparts(&["count", "--t", "2", "--n", "25"]);
    assert!(out.status.success());
    let want = d_t(25, &BoundFactor::rational(2, 1).unwrap()).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), format!("t,n,L,d_t\n2,25,10,{want}\n"));
    assert!(out.stderr.is_empty());
}

#[test]
fn compare_json_round_trips() {
    let out = dparts(&["--format", "json", "compare", "--t", "3", "--n-list", "100,400,900"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["command"], "compare");
    let columns: Vec<&str> = doc["columns"].as_array().unwrap().iter().map(|c| c.as_str().unwrap()).collect();
    assert_eq!(
        columns,
        ["t", "n", "L", "frac", "d_t_exact_digits", "log_exact", "log_estimate", "ratio"]
    );
    let rows = compare_sweep(&BoundFactor::rational(3, 1).unwrap(), &[100, 400, 900]).unwrap();
    for (json_row, lib_row) in doc["rows"].as_array().unwrap().iter().zip(rows) {
        let lib_row = lib_row.unwrap();
        assert_eq!(json_row[1].as_u64().unwrap(), lib_row.n);
        assert_eq!(json_row[5].as_f64().unwrap(), lib_row.log_exact);
        assert_eq!(json_row[6].as_f64().unwrap(), lib_row.log_estimate);
        assert_eq!(json_row[7].as_f64().unwrap(), lib_row.ratio);
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["sample", "--t", "3", "--n", "2500", "--seed", "42", "--count", "200"][..],
        &["--format", "json", "sample", "--t", "1.7", "--n", "900", "--seed", "7", "--count", "50"][..],
        &["compare", "--t", "3/2", "--n-list", "100,200,300"][..],
    ] {
        let a = dparts(args);
        let b = dparts(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn exit_codes_and_streams() {
    let usage = dparts(&["estimate", "--t", "1.2", "--n", "10"]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(usage.stdout.is_empty());
    assert!(!usage.stderr.is_empty());

    let resource = dparts(&["--budget", "100", "count", "--t", "3", "--n", "400"]);
    assert_eq!(resource.status.code(), Some(4));

    let env = Command::new(env!("CARGO_BIN_EXE_dparts"))
        .args(["count", "--t", "3", "--n", "400"])
        .env("DPARTS_WORK_BUDGET", "100")
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(4));
}

#[test]
fn verify_lemmas_passes() {
    let out = dparts(&["verify", "--suite", "lemmas"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}
