//! End-to-end tests of the binary: verbs, artifacts, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn neseek(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neseek"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn list_builtins_names_every_shipped_scenario() {
    let out = neseek(&["list-builtins"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    for name in [
        "scenario_A",
        "scenario_B",
        "scenario_C",
        "scenario_D",
        "estimator_only",
        "scenario_A_flipped",
    ] {
        assert!(text.lines().any(|l| l == name), "missing {name} in {text}");
    }
}

#[test]
fn run_writes_artifacts_and_reports_convergence() {
    let dir = tmp_dir("run_ok");
    let out = neseek(&[
        "run",
        "builtin:estimator_only",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let trajectory = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    assert!(trajectory.starts_with("t,y_1_1,"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["converged"], true);
    assert_eq!(summary["scenario"], "estimator_only");
    assert!(summary["final_error"].as_f64().unwrap() < 1e-2);
}

#[test]
fn oversized_step_exits_two_and_flags_divergence() {
    let dir = tmp_dir("run_diverged");
    let out = neseek(&[
        "run",
        "builtin:scenario_A",
        "--set",
        "integration.h=1.0",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 2);
    assert!(stdout(&out).contains("diverged"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["diverged"], true);
    assert_eq!(summary["converged"], false);
}

#[test]
fn retries_halve_the_step_until_the_run_survives() {
    let dir = tmp_dir("run_retry");
    let out = neseek(&[
        "run",
        "builtin:scenario_A",
        "--set",
        "integration.h=1e-3",
        "--retries",
        "1",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("retrying with h = 0.0005"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["config"]["integration"]["h"], 0.0005);
    // stride doubles so the recording interval in seconds is unchanged
    assert_eq!(summary["config"]["integration"]["stride"], 400);
    assert_eq!(summary["converged"], true);
}

#[test]
fn sweep_writes_rows_in_input_order() {
    let dir = tmp_dir("sweep_ok");
    let out = neseek(&[
        "sweep",
        "builtin:estimator_only",
        "--parameter",
        "estimator.delta",
        "--values",
        "10,1",
        "--set",
        "integration.T=10.0",
        "--jobs",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let csv = std::fs::read_to_string(dir.join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "value,final_error,max_k,diverged");
    assert!(lines[1].starts_with("10,"));
    assert!(lines[2].starts_with("1,"));
    assert_eq!(lines.len(), 3);
}

#[test]
fn empty_sweep_value_list_is_a_config_error() {
    let out = neseek(&[
        "sweep",
        "builtin:estimator_only",
        "--parameter",
        "estimator.delta",
        "--values",
        " ",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("sweep.values"));
}

#[test]
fn malformed_override_names_the_flag() {
    let out = neseek(&["run", "builtin:estimator_only", "--set", "nonsense"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("--set"));
}

#[test]
fn unknown_builtin_is_a_config_error() {
    let out = neseek(&["run", "builtin:nope"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("nope"));
}

#[test]
fn validate_describes_a_good_scenario() {
    let out = neseek(&["validate", "builtin:scenario_C"]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("scenario_C: valid"));
    assert!(text.contains("7 players"));
    assert!(text.contains("warmup windows: 2"));
}

#[test]
fn validate_rejects_bad_values_naming_the_key() {
    let out = neseek(&[
        "validate",
        "builtin:scenario_A",
        "--set",
        "integration.h=-1.0",
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("integration.h"));
}

#[test]
fn config_files_load_from_disk() {
    let dir = tmp_dir("run_file");
    std::fs::create_dir_all(&dir).unwrap();
    let config = dir.join("tiny.toml");
    std::fs::write(
        &config,
        r#"
name = "tiny"

[game]
kind = "named"
name = "connectivity"

[estimator]
mode = "fixed"
delta = 10.0

[integration]
T = 5.0
h = 1e-3
stride = 10
"#,
    )
    .unwrap();
    let out = neseek(&[
        "run",
        config.to_str().unwrap(),
        "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("tiny: converged"));
}
