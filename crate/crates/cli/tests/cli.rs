use std::path::Path;
use std::process::{Command, Output};

fn avflex(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_avflex"))
        .args(args)
        .output()
        .expect("spawn avflex")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_writes_identical_files_twice() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let first = avflex(&["run", "--scenario", "fig1", "--out", a.to_str().unwrap()]);
    let second = avflex(&[
        "run",
        "--scenario",
        "fig1",
        "--workers",
        "3",
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(
        first.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&first.stderr)
    );
    assert_eq!(second.status.code(), Some(0));
    for name in ["results.csv", "summary.json", "plot.gp"] {
        let x = std::fs::read(a.join(name)).unwrap();
        let y = std::fs::read(b.join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name} differs");
    }
}

#[test]
fn converge_prints_summary_json() {
    let out = avflex(&["converge", "--scenario", "fig2", "--norm", "position"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["norm"], "position");
    assert_eq!(v["reports"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_config_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write(tmp.path(), "bad.cfg", "scenario = fig1\nsolver.tol 1e-10\n");
    let out = avflex(&[
        "run",
        "--config",
        &path,
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 2"), "{err}");

    let out = avflex(&["converge", "--config", "/nonexistent/file.cfg"]);
    assert_eq!(out.status.code(), Some(1));
    let out = avflex(&["converge", "--scenario", "fig1", "--solver-tol", "1e-3"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn single_point_ladder_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write(
        tmp.path(),
        "one.cfg",
        "scenario = fig1\nladder.per_period = 100\nschemes = avf\n",
    );
    let out = avflex(&[
        "run",
        "--config",
        &path,
        "--out",
        tmp.path().join("o").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(tmp.path().join("o/results.csv").exists());
}

#[test]
fn step_dumps_energy() {
    let out = avflex(&[
        "step",
        "--scenario",
        "fig1",
        "--scheme",
        "lex",
        "--steps",
        "3",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let steps = v.as_array().unwrap();
    assert_eq!(steps.len(), 4);
    assert!(steps[3]["energy_change"].as_f64().unwrap().abs() < 1e-12);
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed 7"));
}

#[test]
fn help_lists_config_keys() {
    let out = avflex(&["--help"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("solver.tol") && text.contains("cost.matrix_function"));
}
