use std::path::Path;
use std::process::{Command, Output};

use lans_core::io::Checkpoint;

fn lans(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lans")).args(args).current_dir(cwd).output().expect("binary runs")
}

const CONFIG: &str = r#"
id = "tiny"
solver = "both"

[grid]
n = 2
points = 16

[params]
alpha = 0.5
nu = 0.5

[data]
generator = "random-sobolev"
s = 1.0
amplitude = 0.3
seed = 4

[time]
horizon = 0.05
dt = 0.0005
"#;

#[test]
fn solve_writes_a_run_directory_per_invocation() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("tiny.toml"), CONFIG).unwrap();
    let args = ["solve", "--config", "tiny.toml", "--norm", "0.75,2", "--output", "out"];
    let out = lans(&args, tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let run = tmp.path().join("out/tiny");
    for f in ["report.json", "timeseries.csv", "manifest.toml", "checkpoints/timestep-final.lans"] {
        assert!(run.join(f).exists(), "missing {f}");
    }
    let header = std::fs::read_to_string(run.join("timeseries.csv")).unwrap();
    assert!(header.starts_with("t,norm_0_2,norm_1_2,norm_2_2,norm_3_2,norm_0.75_2\n"));
    assert!(lans(&args, tmp.path()).status.success());
    assert!(tmp.path().join("out/tiny-2/report.json").exists());
}

#[test]
fn picard_writes_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("tiny.toml"), CONFIG).unwrap();
    let out = lans(&["picard", "--config", "tiny.toml", "--output", "out"], tmp.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let diag = std::fs::read_to_string(tmp.path().join("out/tiny/diagnostics.csv")).unwrap();
    assert!(diag.starts_with("iteration,e_norm,diff_norm,ratio,residual"));
}

#[test]
fn gen_ic_applies_flag_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    std::fs::write(tmp.path().join("tiny.toml"), CONFIG).unwrap();
    let out = lans(&["gen-ic", "--config", "tiny.toml", "--points", "8", "--out", "ic.lans"], tmp.path());
    assert!(out.status.success());
    let cp = Checkpoint::load(&tmp.path().join("ic.lans")).unwrap();
    assert_eq!(cp.field.grid().points(), 8);
    assert_eq!(cp.params.nu, 0.5);
}

#[test]
fn invalid_input_exits_with_a_field_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = lans(&["solve", "--horizon", "0", "--output", "out"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("time.horizon"));
    assert!(!tmp.path().join("out").exists());
    let out = lans(&["verify", "everything"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_exit_code_follows_the_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = lans(&["verify", "smoothing", "--s1", "0.75", "--s2", "1", "--n", "3", "--p", "2", "--points", "64", "--quick"], tmp.path());
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stdout));
    let bad = lans(&["verify", "smoothing", "--s1", "0.75", "--s2", "1", "--points", "8", "--quick"], tmp.path());
    assert_eq!(bad.status.code(), Some(1));
    let report = std::fs::read_to_string(tmp.path().join("runs/verify-smoothing/report.json")).unwrap();
    assert!(report.contains("\"expected\": -0.125"));
}
