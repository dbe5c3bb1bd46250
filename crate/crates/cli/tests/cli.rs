//! End-to-end checks of the command-line interface: file formats, exit
//! codes, and report determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_lipfree")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("lipfree-cli-test").join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn")
}

fn write(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn elementary_molecule_has_unit_norm() {
    let dir = tmp("unit-norm");
    let space = dir.join("space.json");
    let molecule = dir.join("molecule.json");
    write(
        &space,
        r#"{"p": 0.5, "labels": ["0", "1"], "base": 0, "dist": [[0.0, 2.0], [2.0, 0.0]]}"#,
    );
    write(
        &molecule,
        r#"{"space": "space.json", "coeffs": [-0.5, 0.5]}"#,
    );
    let out = run(&[
        "norm",
        "--space",
        space.to_str().unwrap(),
        "--molecule",
        molecule.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((cert["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(cert["primal"].as_array().unwrap().len() == 1);
    assert!(cert["dual"].as_array().unwrap().len() == 2);
}

#[test]
fn chain_endpoint_difference_has_norm_five() {
    let dir = tmp("chain-five");
    let space = dir.join("space.json");
    let status = run(&[
        "grid",
        "--kind",
        "integer:5",
        "--p",
        "0.5",
        "--out",
        space.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    let molecule = dir.join("molecule.json");
    write(
        &molecule,
        r#"{"space": "space.json", "coeffs": [-1.0, 0.0, 0.0, 0.0, 0.0, 1.0]}"#,
    );
    let out = run(&["norm", "--molecule", molecule.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((cert["value"].as_f64().unwrap() - 5.0).abs() < 1e-10);
}

#[test]
fn oversized_enumeration_exits_with_resource_code() {
    let dir = tmp("cap");
    let space = dir.join("space.json");
    run(&[
        "grid",
        "--kind",
        "integer:11",
        "--p",
        "0.5",
        "--out",
        space.to_str().unwrap(),
    ]);
    let molecule = dir.join("molecule.json");
    let mut coeffs = vec![0.0f64; 12];
    coeffs[0] = -1.0;
    coeffs[11] = 1.0;
    write(
        &molecule,
        &format!(
            r#"{{"space": "space.json", "coeffs": {}}}"#,
            serde_json::to_string(&coeffs).unwrap()
        ),
    );
    let out = run(&[
        "norm",
        "--molecule",
        molecule.to_str().unwrap(),
        "--method",
        "enumerate",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bounds_only"), "{err}");
}

#[test]
fn invalid_space_exits_with_validation_code() {
    let dir = tmp("invalid");
    let molecule = dir.join("molecule.json");
    write(
        &molecule,
        r#"{"space": {"p": 1.0, "labels": ["0","1","2"], "base": 0,
            "dist": [[0,1,3],[1,0,1],[3,1,0]]},
            "coeffs": [-1.0, 0.0, 1.0]}"#,
    );
    let out = run(&["norm", "--molecule", molecule.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exact_flag_reports_a_rational() {
    let dir = tmp("exact");
    let space = dir.join("space.json");
    run(&[
        "grid",
        "--kind",
        "integer:4",
        "--p",
        "1.0",
        "--out",
        space.to_str().unwrap(),
    ]);
    let molecule = dir.join("molecule.json");
    write(
        &molecule,
        r#"{"space": "space.json", "coeffs": [-0.5, 0.0, 0.0, 0.0, 0.5]}"#,
    );
    let out = run(&["norm", "--molecule", molecule.to_str().unwrap(), "--exact"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("exact p=1 value: 2"), "{err}");
}

#[test]
fn verify_reports_are_deterministic() {
    let dir_a = tmp("det-a");
    let dir_b = tmp("det-b");
    for dir in [&dir_a, &dir_b] {
        let out = run(&[
            "verify",
            "--suite",
            "norms",
            "--seed",
            "42",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains("summary:"), "{text}");
    }
    let a = std::fs::read(dir_a.join("norms.csv")).unwrap();
    let b = std::fs::read(dir_b.join("norms.csv")).unwrap();
    assert_eq!(a, b, "reports must be byte-identical");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("id,instance,p,bound,measured,margin,pass\n"));
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = tmp("config");
    let config = dir.join("verify.conf");
    write(
        &config,
        "suite = norms\nseed = 7\n# comment line\nout = this-is-overridden\n",
    );
    let out_dir = dir.join("reports");
    let out = run(&[
        "verify",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(out_dir.join("norms.csv").exists());
    let text = std::fs::read_to_string(out_dir.join("norms.csv")).unwrap();
    assert!(text.contains("seed=7;"), "config seed must be honored");
}

#[test]
fn unknown_suite_is_rejected() {
    let out = run(&["verify", "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn worker_count_does_not_change_reports() {
    let dir_a = tmp("workers-1");
    let dir_b = tmp("workers-4");
    for (dir, workers) in [(&dir_a, "1"), (&dir_b, "4")] {
        let out = run(&[
            "verify",
            "--suite",
            "norms",
            "--seed",
            "123",
            "--workers",
            workers,
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let a = std::fs::read(dir_a.join("norms.csv")).unwrap();
    let b = std::fs::read(dir_b.join("norms.csv")).unwrap();
    assert_eq!(a, b, "reports must not depend on parallelism");
}
