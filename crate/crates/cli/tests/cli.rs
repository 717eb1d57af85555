//! End-to-end runs of the binary: golden tables, exit codes, record output.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn betaexp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betaexp"))
        .args(args)
        .env_remove("BETAEXP_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

// Set BETAEXP_BLESS=1 to rewrite the golden file.
#[test]
fn reproduced_tables_match_golden() {
    let out = betaexp(&["roots", "--reproduce-tables"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let path = golden("tables.txt");
    if std::env::var_os("BETAEXP_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, expected);
}

#[test]
fn tables_are_deterministic_across_runs() {
    let a = stdout(&betaexp(&["roots", "--reproduce-tables"]));
    let b = stdout(&betaexp(&["roots", "--reproduce-tables"]));
    assert_eq!(a, b);
}

#[test]
fn records_round_trip() {
    let out = betaexp(&["--format", "records", "bounds", "--beta", "1.5"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 10);
    let kappa = rows.iter().find(|r| r["quantity"] == "kappa").unwrap();
    assert_eq!(kappa["value"].as_f64(), Some(0.125));
    for r in &rows {
        assert_eq!(r["record"], "bound");
        let back = serde_json::to_string(r).unwrap();
        assert_eq!(serde_json::from_str::<Value>(&back).unwrap(), *r);
    }
}

#[test]
fn oracle_agreement_exits_zero() {
    let out = betaexp(&["count", "--beta", "1.5", "--x", "1", "--k", "12", "--oracle"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("0 words differ"));
}

#[test]
fn csv_has_header_and_one_row() {
    let out = betaexp(&[
        "--format", "csv", "count", "--beta", "lambda:2", "--x", "0.5", "--k", "6",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "beta,x,k,count,method");
    assert_eq!(lines.len(), 2);
}

#[test]
fn bad_input_exits_two() {
    for args in [
        &["count", "--beta", "2.5", "--x", "1", "--k", "3"][..],
        &["count", "--beta", "1.5", "--x", "7", "--k", "3"],
        &["count", "--beta", "1.5", "--x", "1", "--k", "30", "--oracle"],
        &["bernoulli", "--beta", "1.5", "--x", "1", "--method", "mc"],
        &["generate", "--beta", "1.3", "--x", "1", "--m", "1"],
    ] {
        let out = betaexp(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}

#[test]
fn broken_guarantee_exits_three_with_diagnostic() {
    // above omega_1 the dense steering interval no longer traps its orbits
    let out = betaexp(&["generate", "--beta", "1.3", "--x", "1", "--m", "1", "--unchecked"]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    let diag: Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(diag["exit_code"], 3);
    assert!(diag["error"].is_string());
    assert!(stdout(&out).contains("FAILED"));
}

#[test]
fn precision_comes_from_the_environment() {
    let run = |bits: &str| {
        Command::new(env!("CARGO_BIN_EXE_betaexp"))
            .args(["count", "--beta", "1.5", "--x", "1", "--k", "4"])
            .env("BETAEXP_PRECISION_BITS", bits)
            .output()
            .unwrap()
    };
    assert!(run("64").status.success());
    assert_eq!(run("20").status.code(), Some(2));
    let flag = betaexp(&["--precision-bits", "200", "roots"]);
    assert_eq!(flag.status.code(), Some(2));
}

#[test]
fn generator_words_are_prefixes_of_the_entry() {
    let out = betaexp(&[
        "--format", "records", "generate", "--beta", "1.05", "--x", "0.5", "--m", "1", "--blocks", "2", "--words",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let stages: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str::<Value>(l).unwrap())
        .filter(|r| r["record"] == "stage")
        .collect();
    assert_eq!(stages.len(), 3);
    let last = stages[2]["words"].as_array().unwrap();
    assert_eq!(last.len(), 16);
    let entry = stages[0]["words"][0].as_str().unwrap();
    assert!(last.iter().all(|w| w.as_str().unwrap().starts_with(entry)));
}
