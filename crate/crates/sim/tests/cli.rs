//! End-to-end checks of the `vfrls` binary: exit codes, error wording,
//! the validate echo, and the files a run leaves behind.

use std::path::Path;
use std::process::{Command, Output};

use vfrls_sim::config::ScenarioFile;
use vfrls_sim::presets;

fn vfrls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vfrls"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn unknown_preset_exits_2_and_lists_the_available_names() {
    let out = vfrls(&["run", "--preset", "fig99", "--out", "/tmp/never.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("unknown preset `fig99`"), "{err}");
    assert!(err.contains("fig4") && err.contains("sweep-delta"), "{err}");
}

#[test]
fn missing_config_file_exits_2_with_a_not_found_message() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    let out = vfrls(&["run", "--config", missing.to_str().unwrap(), "--out", "/tmp/never.csv"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("missing.toml"), "{err}");
    assert!(err.to_lowercase().contains("no such file"), "{err}");
}

#[test]
fn config_violations_exit_2_naming_every_offending_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    write(
        &path,
        "training_symbols = 300\ntotal_symbols = 200\n[algorithm]\nkind = \"ctvff\"\ndelta1 = 1.0\n",
    );
    let out = vfrls(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("training_symbols: 300 exceeds total_symbols 200"), "{err}");
    assert!(err.contains("delta1: 1 is outside (0, 1)"), "{err}");
}

#[test]
fn missing_source_and_unknown_algorithm_are_usage_errors() {
    let out = vfrls(&["run", "--out", "/tmp/never.csv"]);
    assert_eq!(out.status.code(), Some(2));

    let out = vfrls(&["run", "--preset", "fig4", "--out", "/tmp/never.csv", "--algorithms", "dfe"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown algorithm `dfe`"));
}

#[test]
fn all_trials_diverging_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("div.toml");
    write(
        &path,
        "total_symbols = 200\ntraining_symbols = 50\nruns = 2\n[algorithm]\nkind = \"fixed\"\nlambda = 1e-300\n",
    );
    let out_csv = dir.path().join("div.csv");
    let out = vfrls(&["run", "--config", path.to_str().unwrap(), "--out", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("diverged"));
}

#[test]
fn validate_echo_resolves_to_the_same_config() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sparse.toml");
    write(&path, "doppler = 1e-4\nruns = 7\n[algorithm]\nkind = \"gvff\"\n");
    let out = vfrls(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let echo = String::from_utf8(out.stdout).unwrap();
    assert!(echo.contains("code_length = 15"), "{echo}");
    let reparsed: ScenarioFile = toml::from_str(&echo).unwrap();
    let original: ScenarioFile = toml::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(reparsed.resolve().unwrap(), original.resolve().unwrap());
}

#[test]
fn every_preset_scenario_round_trips_through_the_file_format() {
    for &name in presets::names() {
        let plan = presets::by_name(name).unwrap();
        for sc in &plan.scenarios {
            let text = ScenarioFile::from_config(&sc.config).to_toml();
            let reparsed: ScenarioFile = toml::from_str(&text).unwrap();
            let resolved = reparsed.resolve().unwrap_or_else(|e| panic!("{name}/{}: {e}", sc.label));
            assert_eq!(resolved, sc.config, "{name}/{} drifts through TOML", sc.label);
        }
    }
}

#[test]
fn run_writes_the_results_file_and_the_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tiny.toml");
    write(
        &config,
        "code_length = 7\npath_gains_db = [0.0]\nuser_offsets_db = [0.0, 0.0]\ntotal_symbols = 100\ntraining_symbols = 30\nruns = 2\n[algorithm]\nkind = \"ctvff\"\n",
    );
    let out_csv = dir.path().join("tiny.csv");
    let out = vfrls(&["run", "--config", config.to_str().unwrap(), "--out", out_csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));

    let body = std::fs::read_to_string(&out_csv).unwrap();
    let mut lines = body.lines();
    assert_eq!(
        lines.next().unwrap(),
        "symbol,algorithm,sinr_db,mse,lambda,mult_ops,add_ops,source"
    );
    assert_eq!(lines.count(), 100);

    let sidecar = std::fs::read_to_string(dir.path().join("tiny.csv.meta.toml")).unwrap();
    assert!(sidecar.contains("sinr_averaging = \"linear\""), "{sidecar}");
    assert!(sidecar.contains("tiny.toml"), "{sidecar}");
    assert!(sidecar.contains("[scenarios.config]"), "{sidecar}");
}
