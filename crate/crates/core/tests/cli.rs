//! The `srmab` binary: outputs and exit codes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn srmab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_srmab")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

const HEADER: &str = "id,p01_p,p11_p,p01_a,p11_a,lifetime\n";

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.csv");
    fs::write(&good, format!("{HEADER}7,0.06,0.46,0.46,0.60,5\n")).unwrap();
    let out = srmab(&["validate", path(&good)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("ok: 1 arms"));

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, format!("{HEADER}7,0.06,0.46,0.46,0.60,5\n8,0.50,0.46,0.55,0.60,5\n")).unwrap();
    let out = srmab(&["validate", path(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("line 3: p11_p>p01_p"));

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "").unwrap();
    let out = srmab(&["validate", path(&empty)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no arms"));
}

#[test]
fn index_table_columns() {
    let out = srmab(&["index", "--h-max", "2", "--belief", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("belief,h,exact,linear,logistic,myopic,threshold_whittle"));
    let h0: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(&h0[2..5], &[0.0, 0.0, 0.0]);
    assert!(h0[6] > 0.0);
    let h1: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    for v in &h1[2..5] {
        assert!((v - 0.374).abs() < 1e-5, "{v}");
    }
    let out = srmab(&["index", "--kernel", "0.5,0.46,0.55,0.60"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_errors_and_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "trials = 0\n").unwrap();
    assert_eq!(srmab(&["simulate", "--config", path(&cfg)]).status.code(), Some(1));
    assert_eq!(srmab(&["simulate", "--unknown-flag"]).status.code(), Some(1));
    assert_eq!(srmab(&["sweep"]).status.code(), Some(1));

    // With no budget every policy ties with doing nothing, so benefits are undefined.
    let cfg = dir.path().join("zero.toml");
    fs::write(&cfg, "trials = 2\nhorizon = 5\nbudget = 0\nrate = 2.0\nlifetime = 2\n[cohort]\nsize = 2\n").unwrap();
    let out = srmab(&["simulate", "--config", path(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("undefined"));
}

#[test]
fn simulate_and_sweep_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        "trials = 3\nhorizon = 8\nrate = 3.0\nlifetime = 3\nbudget = 1\npolicies = [\"myopic\", \"linear\"]\n\
         [cohort]\nsize = 3\n[sweep]\nvariable = \"budget\"\nvalues = [1, 2]\n",
    )
    .unwrap();
    let out_dir = dir.path().join("sim");
    let out = srmab(&["simulate", "--config", path(&cfg), "--seed", "3", "--out", path(&out_dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&fs::read(out_dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["seed"], 3);
    assert_eq!(summary["policies"].as_array().unwrap().len(), 4);
    assert!(summary["policies"][0].get("mean_planning_ns").is_none());
    let trials = fs::read_to_string(out_dir.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 4 * 3);

    let sweep_dir = dir.path().join("sweep");
    let out = srmab(&["sweep", "--config", path(&cfg), "--out", path(&sweep_dir)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = fs::read_to_string(sweep_dir.join("sweep.csv")).unwrap();
    assert!(rows.starts_with("variable,value,policy,trial,seed,total_reward,benefit\n"));
    assert_eq!(rows.lines().count(), 1 + 2 * 4 * 3);
    let summary = fs::read_to_string(sweep_dir.join("sweep_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 2 * 4);
}

#[test]
fn bench_reports_speedups() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bench.toml");
    fs::write(&cfg, "trials = 1\nhorizon = 6\nrate = 4.0\nlifetime = 3\nbudget = 1\npolicies = [\"exact\", \"linear\"]\n[cohort]\nsize = 3\n").unwrap();
    let csv_path = dir.path().join("bench.csv");
    let out = srmab(&["bench", "--config", path(&cfg), "--out", path(&csv_path)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("rate,lifetime,budget,policy,periods,mean_ns,p50_ns,p90_ns,speedup_vs_exact,precompute_ns"));
    assert_eq!(text.lines().count(), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("speedup"));
}
