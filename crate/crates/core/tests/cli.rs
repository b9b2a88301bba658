use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn standard_config() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/standard.toml")
}

fn paraek(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_paraek"))
        .args(args)
        .env("RAYON_NUM_THREADS", "2")
        .output()
        .expect("binary runs")
}

#[test]
fn shipped_config_parses_to_the_standard_scenario() {
    let c = paraek::runner::parse_config(&standard_config()).unwrap();
    let mut expected = paraek::runner::RunConfig::standard();
    expected.output = Some("out".into());
    assert_eq!(c, expected);
}

#[test]
fn same_seed_gives_identical_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = standard_config();
    let mut logs = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = paraek(&["verify-calculus", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let stdout = String::from_utf8(o.stdout).unwrap();
        assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 6);
        logs.push(std::fs::read(out.join("calculus/diagnostics.csv")).unwrap());
        assert!(out.join("calculus/summary.json").exists());
    }
    assert_eq!(logs[0], logs[1]);
    let text = String::from_utf8(logs.remove(0)).unwrap();
    assert_eq!(text.lines().next().unwrap(), "experiment,metric,value,limit,pass,suite,seed,n_ax");
}

#[test]
fn invalid_config_lists_every_problem_and_exits_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(standard_config())
        .unwrap()
        .replace("N_ax = 128", "N_ax = 7")
        .replace("cutoff_eps = 0.125", "cutoff_eps = 0.9");
    std::fs::write(&path, text).unwrap();
    let o = paraek(&["solve", "--config", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("grid") && err.contains("cutoff"), "{err}");
    assert!(!dir.path().join("scheme").exists());
}

#[test]
fn unknown_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("typo.toml");
    std::fs::write(&path, "seed = 1\nsed = 2\n").unwrap();
    let o = paraek(&["verify-calculus", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sed"));
}
