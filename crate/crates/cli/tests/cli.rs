use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn zlap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zlap")).args(args).output().unwrap()
}

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn bottleneck_on_p4_reports_two_thirds() {
    let graph = scenarios().join("graphs/p4.txt");
    let out = zlap(&[
        "bottleneck",
        "--graph",
        path_str(&graph),
        "--params",
        r#"{"method":"brute"}"#,
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(report["command"], "bottleneck");
    assert_eq!(report["outputs"]["cut"]["subset"], serde_json::json!([0, 1]));
    let phi = report["outputs"]["cut"]["conductance"].as_f64().unwrap();
    assert!((phi - 2.0 / 3.0).abs() < 1e-15);
}

#[test]
fn output_file_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("spectrum.csv");
    let graph = scenarios().join("graphs/k3.txt");
    let out = zlap(&[
        "spectrum",
        "--graph",
        path_str(&graph),
        "--format",
        "csv",
        "--out",
        path_str(&target),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&target).unwrap();
    assert!(csv.starts_with("index,eigenvalue\n"));
    assert_eq!(csv.lines().count(), 4);
}

#[test]
fn params_may_come_from_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("p.json");
    std::fs::write(&params, r#"{"mu": 0.6, "beta": 0.5}"#).unwrap();
    let graph = scenarios().join("graphs/k3.txt");
    let out = zlap(&["epidemic", "--graph", path_str(&graph), "--params", path_str(&params)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("\"supercritical\""));
}

#[test]
fn input_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "0 1 1\n1 x 1\n").unwrap();
    let out = zlap(&["spectrum", "--graph", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("zlap: ") && err.contains("line 2"), "{err}");
    assert_eq!(err.lines().count(), 1);

    let missing = dir.path().join("missing.txt");
    assert_eq!(
        zlap(&["spectrum", "--graph", path_str(&missing)]).status.code(),
        Some(1)
    );

    let graph = scenarios().join("graphs/p4.txt");
    let unknown = zlap(&[
        "bottleneck",
        "--graph",
        path_str(&graph),
        "--params",
        r#"{"colour": 1}"#,
    ]);
    assert_eq!(unknown.status.code(), Some(1));

    let csv = zlap(&[
        "transform",
        "--graph",
        path_str(&graph),
        "--params",
        r#"{"operator":"consensus"}"#,
        "--format",
        "csv",
    ]);
    assert_eq!(csv.status.code(), Some(1));
    assert!(stderr(&csv).contains("CSV"), "{}", stderr(&csv));
}

#[test]
fn usage_errors_exit_with_one_and_help_with_zero() {
    assert_eq!(zlap(&["spectrum"]).status.code(), Some(1));
    assert_eq!(zlap(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(zlap(&["--help"]).status.code(), Some(0));
    assert_eq!(zlap(&["--version"]).status.code(), Some(0));
}

#[test]
fn scenario_command_must_match() {
    let file = scenarios().join("bottleneck_p4.json");
    let ok = zlap(&["bottleneck", "--scenario", path_str(&file)]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let wrong = zlap(&["spectrum", "--scenario", path_str(&file)]);
    assert_eq!(wrong.status.code(), Some(1));
}

#[test]
fn every_bundled_scenario_is_byte_identical_across_runs() {
    let mut files: Vec<PathBuf> = std::fs::read_dir(scenarios())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    assert!(!files.is_empty());
    for file in files {
        let scenario: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
        let command = scenario["command"].as_str().unwrap();
        let first = zlap(&[command, "--scenario", path_str(&file)]);
        let second = zlap(&[command, "--scenario", path_str(&file)]);
        assert_eq!(first.status.code(), Some(0), "{}: {}", file.display(), stderr(&first));
        assert_eq!(first.stdout, second.stdout, "{}", file.display());
    }
}
