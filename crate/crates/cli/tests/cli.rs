use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use asep_core::tables::DistributionTable;

fn asep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asep"))
        .args(args)
        .env_remove("ASEP_THREADS")
        .output()
        .expect("binary runs")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn moments_table_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = asep(&["moments", "--p", "0.3", "--t", "1", "--k", "3", "--method", "partition", "--out-path", path_arg(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.path().join("moments.csv"));
    assert_eq!(r[0], ["k", "value", "stderr_or_quaderr", "method"]);
    assert_eq!(r.len(), 5);
    assert_eq!(r[1][0], "0");
    assert_eq!(r[1][1].parse::<f64>().unwrap(), 1.0);
    assert!(r.iter().skip(1).all(|row| row[3] == "partition"));
}

#[test]
fn duality_and_determinant_tables_agree() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, method) in [(&a, "duality"), (&b, "tw")] {
        let out = asep(&["dist", "--p", "0.3", "--t", "1", "--M", "12", "--method", method, "--out-path", path_arg(dir.path())]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let (ra, rb) = (rows(&a.path().join("dist.csv")), rows(&b.path().join("dist.csv")));
    assert_eq!(ra[0], ["m", "mass", "err", "method"]);
    let mass = |r: &Vec<Vec<String>>, m: usize| r.get(m + 1).map_or(0.0, |row| row[1].parse::<f64>().unwrap());
    for m in 0..=12 {
        assert!((mass(&ra, m) - mass(&rb, m)).abs() <= 1e-4, "m = {m}");
    }
}

#[test]
fn quick_validation_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = asep(&["validate", "--quick", "--out-path", path_arg(dir.path())]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = path_arg(dir.path());
    for args in [
        vec!["moments", "--method", "tw", "--out-path", d],
        vec!["moments", "--kappa", "1", "--out-path", d],
        vec!["moments", "--p", "0.8", "--out-path", d],
        vec!["moments", "--bogus", "1"],
        vec!["gue", "--s", "-9", "--out-path", d],
    ] {
        assert_eq!(asep(&args).status.code(), Some(2), "{args:?}");
    }
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"p": 0.3, "unknown": 1}"#).unwrap();
    assert_eq!(asep(&["moments", "--config", path_arg(&bad)]).status.code(), Some(2));
}

#[test]
fn computation_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // the support cannot resolve the current at this time
    let out = asep(&["dist", "--t", "30", "--M", "6", "--out-path", path_arg(dir.path())]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn emitted_config_reproduces_the_run() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    let out = asep(&["simulate", "--t", "2", "--replicas", "500", "--seed", "9", "--out-path", path_arg(first.path())]);
    assert!(out.status.success());
    let config = first.path().join("config.json");
    let out = asep(&["run", "--config", path_arg(&config), "--out-path", path_arg(second.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["moments.csv", "dist.csv"] {
        assert_eq!(fs::read(first.path().join(f)).unwrap(), fs::read(second.path().join(f)).unwrap(), "{f}");
    }
    // flags override the file
    let third = tempfile::tempdir().unwrap();
    let out = asep(&["simulate", "--config", path_arg(&config), "--seed", "10", "--out-path", path_arg(third.path())]);
    assert!(out.status.success());
    let replay: serde_json::Value = serde_json::from_slice(&fs::read(third.path().join("config.json")).unwrap()).unwrap();
    assert_eq!(replay["seed"], 10);
    assert_eq!(replay["replicas"], 500);
}

#[test]
fn thread_count_does_not_change_results() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |d: &Path| vec!["simulate".to_string(), "--t".into(), "3".into(), "--replicas".into(), "800".into(), "--out-path".into(), path_arg(d).to_string()];
    let one = Command::new(env!("CARGO_BIN_EXE_asep")).args(args(a.path())).arg("--threads").arg("1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_asep")).args(args(b.path())).env("ASEP_THREADS", "4").output().unwrap();
    assert!(one.status.success() && many.status.success());
    for f in ["moments.csv", "dist.csv"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap());
    }
}

#[test]
fn json_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = asep(&["dist", "--t", "0.5", "--out-format", "both", "--out-path", path_arg(dir.path())]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("dist.json")).unwrap();
    let table: DistributionTable = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&table).unwrap() + "\n", text);
    let config = fs::read_to_string(dir.path().join("config.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&config).unwrap();
    assert_eq!(v["command"], "dist");
    assert!(dir.path().join("dist.csv").exists());
}

#[test]
fn comparison_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = asep(&["compare", "--t", "20", "--replicas", "300", "--plot", "--out-path", path_arg(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = rows(&dir.path().join("compare.csv"));
    assert_eq!(r[0], ["s", "empirical", "f_gue"]);
    assert_eq!(r.len(), 34);
    let svg = fs::read_to_string(dir.path().join("compare.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("F_GUE"));
}
