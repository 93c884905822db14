use std::path::Path;
use std::process::{Command, Output};

fn spinlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

const MIX: &str = r#"
[model]
type = "coloring"
graph = "path:3"
k = 6

[task]
kind = "mix-exact"

[run]
seed = 1
"#;

const SAMPLE: &str = r#"
[model]
type = "hardcore"
graph = "grid:3x3"
lambda = 0.2

[task]
kind = "sample"

[run]
seed = 9
chains = 3
steps = 5000
thin = 50
"#;

#[test]
fn mix_exact_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "mix.toml", MIX);
    let out = dir.path().join("out");
    let o = spinlab(&["mix-exact", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["task"], "mix-exact");
    assert!(summary["spinlab_version"].is_string());
    assert_eq!(summary["config"]["model"]["k"], 6);
    assert_eq!(summary["result"]["bound_holds"], true);
    assert!(out.join("mixing_curve.csv").exists());
}

#[test]
fn sample_output_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "s.toml", SAMPLE);
    let mut csvs = Vec::new();
    for (k, threads) in ["1", "1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("o{k}"));
        let o = spinlab(&["sample", "--config", &cfg, "--threads", threads, "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        csvs.push(std::fs::read(out.join("samples.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);

    let out = dir.path().join("other_seed");
    let o = spinlab(&["sample", "--config", &cfg, "--seed", "10", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_ne!(std::fs::read(out.join("samples.csv")).unwrap(), csvs[0]);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_p = write_config(dir.path(), "bad.toml", &SAMPLE.replace("lambda = 0.2", "lambda = -1.0"));
    assert_eq!(spinlab(&["sample", "--config", &bad_p]).status.code(), Some(2));

    let no_seed = write_config(dir.path(), "noseed.toml", &SAMPLE.replace("seed = 9", ""));
    assert_eq!(spinlab(&["sample", "--config", &no_seed]).status.code(), Some(2));

    let conflict = write_config(dir.path(), "mix.toml", MIX);
    assert_eq!(spinlab(&["sample", "--config", &conflict]).status.code(), Some(2));

    assert_eq!(spinlab(&["sample", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    assert_eq!(spinlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn uncertifiable_model_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
[model]
type = "hardcore"
graph = "complete:30"
lambda = 0.5
[task]
kind = "certify"
[run]
seed = 1
"#;
    let cfg = write_config(dir.path(), "c.toml", text);
    let out = dir.path().join("o");
    let o = spinlab(&["certify", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn validate_reports_problems() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_config(dir.path(), "g.toml", MIX);
    let o = spinlab(&["validate", "--config", &good]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("ok"));

    let bad = write_config(dir.path(), "b.toml", &MIX.replace("k = 6", "k = 6\ncolour = 1"));
    let o = spinlab(&["validate", "--config", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("error"));
}
