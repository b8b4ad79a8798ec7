mod common;

use std::path::Path;
use std::process::{Command, Output};

use qirl::harness::{read_episodes_csv, read_summary, EPISODES_FILE, SUMMARY_FILE};

use common::{config_path, GRID_3X3, UAV_10X10};

fn qirl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qirl"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn run_3x3(dir: &Path, agent: &str) -> Output {
    qirl(&[
        "run",
        "--config",
        config_path(GRID_3X3).to_str().unwrap(),
        "--agent",
        agent,
        "--episodes",
        "300",
        "--seeds",
        "1,2,3",
        "--out",
        dir.to_str().unwrap(),
    ])
}

#[test]
fn oracle_prints_the_optimum() {
    let out = qirl(&[
        "oracle",
        "--config",
        config_path(GRID_3X3).to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("optimal return   1.300000e1"), "{text}");
    assert!(text.contains("(0, 0)") && text.contains("(2, 2)"), "{text}");
}

#[test]
fn oracle_on_the_large_layout_compresses_the_shuttle() {
    let out = qirl(&[
        "oracle",
        "--config",
        config_path(UAV_10X10).to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("steps used       900"), "{text}");
    assert!(text.contains("]x"), "{text}");
}

#[test]
fn run_writes_all_outputs_and_metrics_reads_them_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_3x3(dir.path(), "ql_boltz");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for f in ["episodes.csv", "trajectory.csv", "summary.json"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let rows = read_episodes_csv(&dir.path().join(EPISODES_FILE)).unwrap();
    assert_eq!(rows.len(), 900);
    let summary = read_summary(&dir.path().join(SUMMARY_FILE)).unwrap();
    assert_eq!(summary.seeds.len(), 3);

    let m = qirl(&["metrics", "--in", dir.path().to_str().unwrap()]);
    assert!(m.status.success());
    let text = stdout(&m);
    for s in &summary.seeds {
        let ep90 = s.metric.episodes_to_90pct.unwrap().to_string();
        let line = text
            .lines()
            .find(|l| l.starts_with(&format!("seed {:>6}", s.seed)))
            .unwrap();
        assert!(line.contains(&format!("ep90 {ep90:>6}")), "{line}");
    }
}

#[test]
fn unknown_agent_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_3x3(dir.path(), "sarsa");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_layout_reports_its_line() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(config_path(GRID_3X3))
        .unwrap()
        .replace("terminal = [2, 2]", "terminal = [5, 2]");
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, &text).unwrap();
    let line = text
        .lines()
        .position(|l| l.starts_with("terminal"))
        .unwrap()
        + 1;
    let out = qirl(&["oracle", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&format!("line {line}")), "{err}");
}

#[test]
fn missing_run_directory_is_a_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = qirl(&["metrics", "--in", dir.path().join("nope").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn zero_episodes_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = qirl(&[
        "run",
        "--config",
        config_path(GRID_3X3).to_str().unwrap(),
        "--agent",
        "qirl",
        "--episodes",
        "0",
        "--seeds",
        "1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}
