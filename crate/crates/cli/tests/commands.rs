use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_benford-smooth"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn sample_file(dir: &Path, name: &str, family: &str, beta: &str, n: &str, seed: &str) -> String {
    let path = dir.join(name);
    let out = run(&[
        "sample", "--family", family, "--beta", beta, "--n", n, "--seed", seed, "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_owned()
}

fn digit_shares(path: &str) -> [f64; 9] {
    let text = fs::read_to_string(path).unwrap();
    let mut counts = [0usize; 9];
    let mut n = 0;
    for line in text.lines() {
        let d: usize = line.parse().unwrap();
        counts[d - 1] += 1;
        n += 1;
    }
    counts.map(|c| c as f64 / n as f64)
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stderr));
    })
}

#[test]
fn uniform_mixture_sample() {
    let dir = TempDir::new().unwrap();
    let path = sample_file(dir.path(), "u.txt", "mixture", "1", "9000", "17");
    for share in digit_shares(&path) {
        assert!((share - 1.0 / 9.0).abs() < 0.02);
    }
}

#[test]
fn sampling_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = sample_file(dir.path(), "a.txt", "rodriguez", "-2.5", "2000", "99");
    let b = sample_file(dir.path(), "b.txt", "rodriguez", "-2.5", "2000", "99");
    assert_eq!(fs::read(a).unwrap(), fs::read(b).unwrap());
}

#[test]
fn contaminated1_first_digit_share() {
    let dir = TempDir::new().unwrap();
    let path = sample_file(dir.path(), "c.txt", "contaminated1", "0.6", "100000", "4");
    assert!((digit_shares(&path)[0] - 0.4096).abs() < 0.005);
}

#[test]
fn sampling_rejects_bad_parameters() {
    assert_eq!(run(&["sample", "--family", "mixture", "--beta", "1.5", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run(&["sample", "--family", "zipf", "--beta", "1", "--n", "10"]).status.code(), Some(2));
}

#[test]
fn zero_is_skipped_under_strict_policy() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("z.txt");
    fs::write(&path, "0\n125\n0.031\n7e3\n").unwrap();
    let out = run(&["analyze", path.to_str().unwrap(), "--seed", "1", "--tests", "T2", "--calibration", "mc", "--reps", "200"]);
    let r = report(&out);
    assert_eq!(r["skipped"], 1);
    assert_eq!(r["n"], 3);
    assert_eq!(r["frequencies"][0]["count"], 1);
    assert_eq!(r["frequencies"][2]["count"], 1);
    assert_eq!(r["frequencies"][6]["count"], 1);
}

#[test]
fn mixture_data_are_rejected_by_the_data_driven_test() {
    let dir = TempDir::new().unwrap();
    let path = sample_file(dir.path(), "m.txt", "mixture", "0.4", "500", "2718");
    let out = run(&["analyze", &path, "--seed", "5", "--reps", "2000"]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["calibration"]["seed"], 5);
    assert_eq!(r["calibration"]["seed_source"], "explicit");
    let tests = r["tests"].as_array().unwrap();
    let ids: Vec<&str> = tests.iter().map(|t| t["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["T2", "TK5", "U2", "MAD", "chi2"]);
    let tk = tests.iter().find(|t| t["id"] == "TK5").unwrap();
    assert_eq!(tk["reject"], true);
    assert!(tk["selected_k"].as_u64().is_some());
}

#[test]
fn benford_data_are_rejected_at_about_the_nominal_rate() {
    let dir = TempDir::new().unwrap();
    let runs = 120;
    let mut rejections = [0usize; 5];
    for i in 0..runs {
        let path = sample_file(dir.path(), "lnb.txt", "mixture", "0", "500", &(1000 + i).to_string());
        let out = run(&["analyze", &path, "--seed", &i.to_string(), "--reps", "1000"]);
        let r = report(&out);
        for (slot, t) in rejections.iter_mut().zip(r["tests"].as_array().unwrap()) {
            *slot += usize::from(t["reject"].as_bool().unwrap());
        }
    }
    // Binomial(120, 0.05) lies in [0, 15] with probability above 0.998.
    for count in rejections {
        assert!(count <= 15, "{rejections:?}");
    }
    assert!(rejections.iter().sum::<usize>() >= 10, "{rejections:?}");
}

#[test]
fn column_selection_and_errors() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("t.csv");
    let mut text = String::from("id;amount\n");
    for i in 1..=300 {
        text.push_str(&format!("{i};{}\n", 10f64.powf(i as f64 * 0.0137)));
    }
    fs::write(&path, text).unwrap();
    let p = path.to_str().unwrap();
    let out = run(&["analyze", p, "--column", "amount", "--delimiter", ";", "--seed", "1", "--reps", "500"]);
    assert!(out.status.code() == Some(0) || out.status.code() == Some(1));
    assert_eq!(report(&out)["n"], 300);

    assert_eq!(run(&["analyze", p, "--column", "total", "--delimiter", ";"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "/nonexistent/file.txt"]).status.code(), Some(2));
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "0\n-1\n").unwrap();
    assert_eq!(run(&["analyze", empty.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["analyze", p, "--tests", "T9"]).status.code(), Some(2));
}

#[test]
fn unparseable_records() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("x.txt");
    fs::write(&path, "12\nabc\n-40\n3.5\n").unwrap();
    let p = path.to_str().unwrap();
    assert_eq!(run(&["analyze", p, "--tests", "T1", "--calibration", "mc", "--reps", "100"]).status.code(), Some(2));
    let out = run(&["analyze", p, "--policy", "skip-invalid", "--tests", "T1", "--calibration", "mc", "--reps", "100", "--seed", "3"]);
    assert_eq!(report(&out)["skipped"], 2);
    let out = run(&["analyze", p, "--policy", "absolute", "--tests", "T1", "--calibration", "mc", "--reps", "100", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn asymptotic_calibration_needs_a_limit_law() {
    let dir = TempDir::new().unwrap();
    let path = sample_file(dir.path(), "s.txt", "mixture", "0", "200", "1");
    assert_eq!(run(&["analyze", &path, "--tests", "MAD", "--calibration", "asymptotic"]).status.code(), Some(2));
    let out = run(&["analyze", &path, "--tests", "T3,chi2", "--calibration", "asymptotic"]);
    let r = report(&out);
    assert_eq!(r["calibration"]["seed_source"], "entropy");
    for t in r["tests"].as_array().unwrap() {
        assert_eq!(t["calibration"], "asymptotic");
    }
}

#[test]
fn critical_value_cache() {
    let dir = TempDir::new().unwrap();
    let cache = dir.path().join("cv.tsv");
    let c = cache.to_str().unwrap();
    let args = ["critical-values", "--statistic", "T2,U2", "--n", "300", "--reps", "2000", "--seed", "8", "--cache", c];
    let first = run(&args);
    assert!(first.status.success());
    assert!(String::from_utf8_lossy(&first.stderr).contains("computed: T2"));
    let second = run(&args);
    assert!(String::from_utf8_lossy(&second.stderr).contains("cache hit: T2"));
    assert!(!String::from_utf8_lossy(&second.stderr).contains("computed"));
    assert_eq!(first.stdout, second.stdout);
    let record: Value = serde_json::from_slice(first.stdout.split(|&b| b == b'\n').next().unwrap()).unwrap();
    assert_eq!(record["statistic_id"], "T2");
    assert_eq!(record["replications"], 2000);
}

#[test]
fn critical_value_errors() {
    assert_eq!(run(&["critical-values", "--statistic", "T2", "--n", "100", "--alpha", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["critical-values", "--statistic", "T2", "--n", "100", "--reps", "10"]).status.code(), Some(2));
    assert_eq!(run(&["critical-values", "--statistic", "Z", "--n", "100"]).status.code(), Some(2));
}

fn power_table(csv: &[u8]) -> Vec<(String, f64, f64)> {
    let text = String::from_utf8(csv.to_vec()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("family,test,n,beta,power,replications,seed"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].to_owned(), f[3].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect()
}

#[test]
fn power_curves() {
    let args = [
        "power", "--family", "pietronero", "--betas", "0.2,0.4,0.6,1,1.6,1.8,2", "--reps", "2000", "--null-reps",
        "10000", "--seed", "21",
    ];
    let first = run(&args);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert_eq!(first.stdout, run(&args).stdout);
    let rows = power_table(&first.stdout);
    assert_eq!(rows.len(), 5 * 7);
    let power = |test: &str, beta: f64| rows.iter().find(|r| r.0 == test && r.1 == beta).unwrap().2;
    for test in ["T2", "TK5", "U2", "MAD", "chi2"] {
        assert!((power(test, 1.0) - 0.05).abs() < 0.02, "{test}");
    }
    for beta in [0.2, 0.4, 0.6, 1.6, 1.8, 2.0] {
        assert!(power("T2", beta) > power("chi2", beta) + 0.03, "β = {beta}");
    }
}

#[test]
fn power_rejects_inadmissible_grids() {
    assert_eq!(run(&["power", "--family", "hurlimann", "--betas", "0,1", "--seed", "1"]).status.code(), Some(2));
    assert_eq!(run(&["power", "--family", "contaminated1", "--betas", "0.7", "--seed", "1"]).status.code(), Some(2));
}
