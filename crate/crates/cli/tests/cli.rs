//! Binary-level checks: exit codes, flag handling, and output stability.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_progtherm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn enumerate_succeeds_and_is_stable() {
    let a = run(&["enumerate"]);
    let b = run(&["enumerate"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("total cores: 1112"));
    assert!(text.contains("{0,1}: ground 10 (core 7), m 2"));
}

#[test]
fn invalid_marker_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[machine]\nmarker = \"11\"\n");
    let out = run(&["--config", config.to_str().unwrap(), "enumerate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("marker"), "stderr: {err}");
}

#[test]
fn tiny_universe_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[universe]\nsize = 1\n");
    let out = run(&["--config", config.to_str().unwrap(), "enumerate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_toml_exits_2_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), "[universe\nsize = 4\n");
    let out = run(&["--config", config.to_str().unwrap(), "enumerate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 1"), "stderr: {err}");
}

#[test]
fn out_of_range_object_exits_2() {
    let out = run(&["work", "--x", "9", "--y", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unsatisfiable_target_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // pairs need 7-bit cores; bound of 5 cannot cover any pair
    let config = write_config(dir.path(), "[machine]\ncore_bound = 5\n");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "work",
        "--x",
        "0",
        "--y",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oversized_window_exits_3() {
    // pair ground core length is 7, so excess 13 needs 20-bit cores and the
    // default table stops at 19
    let out = run(&["work", "--x", "0", "--y", "1", "--excess", "13"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn work_ti_and_direct_agree_at_strong_coupling() {
    let direct = run(&[
        "work", "--x", "0", "--y", "1", "--beta", "1", "--excess", "4",
    ]);
    let ti = run(&[
        "work",
        "--x",
        "0",
        "--y",
        "1",
        "--beta",
        "1",
        "--excess",
        "4",
        "--mode",
        "ti",
        "--coupling",
        "50",
    ]);
    assert!(direct.status.success() && ti.status.success());
    let grab = |out: &Output, key: &str| -> f64 {
        String::from_utf8_lossy(&out.stdout)
            .lines()
            .filter_map(|l| {
                let mut tokens = l.split_whitespace();
                match (tokens.next(), tokens.next(), tokens.next()) {
                    (Some(name), Some(value), None) if name == key => value.parse().ok(),
                    _ => None,
                }
            })
            .next()
            .unwrap()
    };
    // TI integrates the shared-window ensemble, whose endpoint difference is
    // the hard-coupling work; at beta J = 50 the soft-hard gap is far below
    // the print precision
    let quad_residual = grab(&ti, "quad_residual");
    assert!(quad_residual < 1e-6);
    // direct work uses per-constraint windows, TI the shared window, so the
    // two values differ; both must be finite and positive here
    assert!(grab(&direct, "work") > 0.0);
    assert!(grab(&ti, "integral") > 0.0);
}

#[test]
fn threads_flag_does_not_change_output() {
    let a = run(&["--threads", "1", "sweep_help_placeholder_ignored"]);
    // unknown subcommand should fail parsing regardless of threads
    assert!(!a.status.success());
    let one = bin().args(["--threads", "1", "udt"]).output().unwrap();
    let many = bin().args(["--threads", "4", "udt"]).output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn jarzynski_writes_logs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        "[protocol]\nsteps = 8\nsweeps = 10\ntrajectories = 24\nseed = 7\n",
    );
    let out_dir = dir.path().join("jz");
    let out = run(&[
        "--config",
        config.to_str().unwrap(),
        "jarzynski",
        "--x",
        "0",
        "--y",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let log = std::fs::read_to_string(out_dir.join("trajectories.csv")).unwrap();
    assert_eq!(log.lines().count(), 25); // header + 24 works
    assert!(log.starts_with("trajectory,work\n"));
    let summary = std::fs::read_to_string(out_dir.join("summary.csv")).unwrap();
    assert!(summary.contains("delta_f_estimate"));
}
