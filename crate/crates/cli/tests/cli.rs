use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn gtcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtcap")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = gtcap(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(args)).unwrap()
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = gtcap(args);
    (out.status.code().unwrap(), String::from_utf8(out.stderr).unwrap())
}

#[test]
fn bounds_report() {
    let v = json(&["bounds", "--n", "500", "--k", "10", "--t", "60"]);
    assert!((v["converse"].as_f64().unwrap() - 4.690_284e-3).abs() < 1e-8);
    assert_eq!(v["hwang_tests"], 78);
    assert_eq!(json(&["bounds", "--n", "4", "--k", "0"])["log2_binom"], 0.0);
    let v = json(&["bounds", "--n", "10", "--k", "2", "--noise", "erasure:0.25"]);
    assert_eq!(v["channel_capacity"], 0.75);
    for field in ["t", "rate", "converse", "weak_converse"] {
        assert!(v.get(field).is_none(), "{field} present without --t");
    }
}

#[test]
fn argument_errors_exit_2_and_name_the_flag() {
    let (code, err) = exit_code(&["bounds", "--n", "3", "--k", "5"]);
    assert_eq!(code, 2);
    assert!(err.contains("--n/--k"));
    let (code, err) = exit_code(&["bounds", "--n", "10", "--k", "2", "--noise", "erasure:1.5"]);
    assert_eq!(code, 2);
    assert!(err.contains("--noise"), "{err}");
    let (code, err) = exit_code(&["capacity", "--beta", "1.2", "--n-list", "100,200", "--trials", "10"]);
    assert_eq!(code, 2);
    assert!(err.contains("--beta"));
    let (code, err) = exit_code(&["sweep", "--alg", "hgbsa", "--n", "10", "--k", "2", "--t-min", "5", "--t-max", "4"]);
    assert_eq!(code, 2);
    assert!(err.contains("--t-min"));
    let (code, err) = exit_code(&["simulate", "--alg", "nope", "--n", "10", "--k", "2"]);
    assert_eq!(code, 2);
    assert!(err.contains("--alg"));
}

#[test]
fn simulate_is_deterministic_and_within_guarantee() {
    let args = ["simulate", "--alg", "hgbsa", "--n", "500", "--k", "10", "--trials", "1000", "--seed", "7"];
    let first = stdout(&args);
    assert_eq!(first, stdout(&args));
    let v: Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["success_rate"], 1.0);
    assert!(v["max_tests"].as_u64().unwrap() <= 78);
    assert_eq!(v["seed"], 7);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["simulate", "--alg", "variant", "--n", "300", "--k", "6", "--trials", "500", "--noise", "erasure:0.2"];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_gtcap")).args(args).env("GT_THREADS", threads).output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    assert_eq!(run("1"), run("0"));
}

#[test]
fn simulate_comp() {
    let v = json(&["simulate", "--alg", "comp", "--n", "100", "--k", "5", "--t", "126", "--trials", "10000", "--seed", "7"]);
    let sigma = (0.01f64 * 0.99 / 1e4).sqrt();
    assert!(v["error_rate"].as_f64().unwrap() <= 0.01 + 3.0 * sigma);
    assert_eq!(v["comp_tests"], 126);
}

#[test]
fn sweep_csv() {
    let args = ["sweep", "--alg", "hgbsa", "--n", "10", "--k", "2", "--t-min", "1", "--t-max", "10", "--trials", "5000", "--seed", "1"];
    let text = stdout(&args);
    let mut with_format = args.to_vec();
    with_format.extend(["--format", "csv"]);
    assert_eq!(text, stdout(&with_format));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,success,ci_lo,ci_hi,converse,weak_converse,algorithm");
    assert_eq!(lines.len(), 11);
    let success: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(success.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(lines[3].split(',').nth(4).unwrap(), "0.177778");

    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert_eq!(exit_code(&json_args).0, 2);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let mut file_args = args.to_vec();
    file_args.extend(["--out", path.to_str().unwrap()]);
    assert!(stdout(&file_args).is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap(), text);
}

#[test]
fn figure1_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let printed = stdout(&["figure1", "--out-dir", out, "--trials", "200", "--seed", "3"]);
    let paths: Vec<&str> = printed.lines().collect();
    assert_eq!(paths.len(), 2);
    let first: Vec<String> = paths.iter().map(|p| fs::read_to_string(p).unwrap()).collect();
    assert!(first.iter().all(|t| t.lines().count() > 2));
    let marker: f64 = first[0].lines().nth(1).unwrap().rsplit(',').next().unwrap().parse().unwrap();
    assert!((marker - 67.736).abs() < 1e-3);
    stdout(&["figure1", "--out-dir", out, "--trials", "200", "--seed", "3"]);
    for (p, text) in paths.iter().zip(&first) {
        assert_eq!(&fs::read_to_string(p).unwrap(), text);
    }
}

#[test]
fn figure1_unwritable_directory_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let (code, _) = exit_code(&["figure1", "--out-dir", blocker.to_str().unwrap(), "--trials", "5"]);
    assert_eq!(code, 3);
}

#[test]
fn capacity_rates() {
    let text = stdout(&["capacity", "--beta", "0.63", "--n-list", "500,9699", "--trials", "200", "--seed", "2"]);
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
    assert_eq!(rows.len(), 2);
    let headers = r.headers().unwrap().clone();
    let col = |row: &csv::StringRecord, name: &str| -> f64 {
        let i = headers.iter().position(|h| h == name).unwrap();
        row[i].parse().unwrap()
    };
    assert_eq!(col(&rows[0], "k"), 10.0);
    assert_eq!(col(&rows[1], "k"), 30.0);
    assert!((col(&rows[0], "guarantee_rate") - 0.868).abs() < 1e-3);
    assert!((col(&rows[1], "guarantee_rate") - 289.5348 / 320.0).abs() < 1e-3);
    for row in &rows {
        assert!(col(row, "mean_rate") < 1.0 && col(row, "guarantee_rate") < 1.0);
    }
    assert!(col(&rows[0], "mean_rate") < col(&rows[1], "mean_rate"));
}
