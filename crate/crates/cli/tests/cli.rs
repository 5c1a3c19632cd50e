use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwkit")).args(args).output().unwrap()
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwkit")).args(args).env(key, value).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hwkit-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn coeffs_csv_and_text() {
    let csv = stdout(&run(&["coeffs", "h", "3"]));
    let exact: Vec<&str> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert_eq!(exact, ["0/1", "6/1", "-9/5", "144/175"]);
    let text = stdout(&run(&["coeffs", "G", "4", "--format", "text"]));
    assert!(text.contains("-1/70"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["coeffs", "h", "0"][..],
        &["coeffs", "nope", "3"],
        &["price", "table3", "--format", "text"],
        &["eval", "F", "1", "--domain", "2,3"],
        &["frobnicate"],
    ] {
        assert_eq!(run(args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(run_env(&["price", "table3"], "HWKIT_THREADS", "zero").status.code(), Some(2));
}

#[test]
fn io_parse_and_numeric_exit_codes() {
    assert_eq!(run(&["price", "/nonexistent/scenarios.json"]).status.code(), Some(3));
    let bad = scratch("bad.json");
    fs::write(&bad, "[{\"S0\": 2.0}]").unwrap();
    assert_eq!(run(&["price", bad.to_str().unwrap()]).status.code(), Some(4));
    let negative = scratch("negative.json");
    fs::write(&negative, r#"[{"S0": 2.0, "r": 0.05, "sigma": -0.5, "T": 1.0, "K": 2.0}]"#).unwrap();
    assert_eq!(run(&["price", negative.to_str().unwrap()]).status.code(), Some(4));
    assert_eq!(run(&["theta", "20", "0.05"]).status.code(), Some(5));
}

#[test]
fn scenario_file_prices_like_the_builtin_table() {
    let file = scratch("one.json");
    fs::write(&file, r#"[{"S0": 2.0, "r": 0.05, "sigma": 0.5, "T": 1.0, "K": 2.0}]"#).unwrap();
    let from_file = stdout(&run(&["price", file.to_str().unwrap(), "--format", "json"]));
    let builtin = stdout(&run(&["price", "table3", "--format", "json"]));
    let a: serde_json::Value = serde_json::from_str(&from_file).unwrap();
    let b: serde_json::Value = serde_json::from_str(&builtin).unwrap();
    assert_eq!(a[0]["C_A"], b[4]["C_A"]);
    assert_eq!(a[0]["n"], b[4]["n"]);
    let keys: Vec<&String> = b[0].as_object().unwrap().keys().collect();
    assert_eq!(keys, ["scenario", "mu", "tau", "c_A", "n", "C_A", "C_A_raw", "P_A"]);
}

#[test]
fn output_is_deterministic_across_threads_and_sinks() {
    let first = stdout(&run(&["price", "table3", "--precision", "15"]));
    let again = stdout(&run(&["price", "table3", "--precision", "15"]));
    let single = stdout(&run_env(&["price", "table3", "--precision", "15"], "HWKIT_THREADS", "1"));
    assert_eq!(first, again);
    assert_eq!(first, single);
    let path = scratch("prices.csv");
    let quiet = stdout(&run(&["price", "table3", "--precision", "15", "--out", path.to_str().unwrap()]));
    assert!(quiet.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap(), first);
}

#[test]
fn eval_reports_the_path() {
    let csv = stdout(&run(&["eval", "F", "1", "20"]));
    let paths: Vec<&str> = csv.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert_eq!(paths, ["series", "exact"]);
}

#[test]
fn theta_methods() {
    let csv = stdout(&run(&["theta", "5", "0.2"]));
    let hw: f64 = csv.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    let csv = stdout(&run(&["theta", "5", "0.2", "asymptotic"]));
    let asym: f64 = csv.lines().nth(1).unwrap().split(',').nth(3).unwrap().parse().unwrap();
    assert!((asym / hw - 1.0).abs() < 0.01);
    let csv = stdout(&run(&["theta", "20", "0.05", "--unchecked"]));
    let change: f64 = csv.lines().nth(1).unwrap().split(',').nth(4).unwrap().parse().unwrap();
    assert!(change > 1e-3);
}

#[test]
fn density_grid() {
    let csv = stdout(&run(&["density", "0.01", "0", "--grid", "0.8,1.25,5"]));
    assert_eq!(csv.lines().count(), 6);
    let f: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(f.iter().all(|&x| x > 0.0));
}
