use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn cqc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cqc"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn summary(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

fn assert_ok(out: &Output) {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn chain_rerun_from_summary_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    assert_ok(&cqc(&["chain", "--profile", "flat", "--n", "3,5", "--points", "41", "--seed", "11", "--out", path(&first)]));
    let s = summary(&first);
    assert_eq!(s["config"]["seed"], 11);
    assert_eq!(s["config"]["experiment"]["kind"], "chain");

    let cfg = first.join("summary.json");
    assert_ok(&cqc(&["chain", "--config", path(&cfg), "--out", path(&second)]));
    for name in ["chain_flat_n3.csv", "chain_flat_n5.csv"] {
        let a = fs::read(first.join(name)).unwrap();
        let b = fs::read(second.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs");
    }
    let header = fs::read_to_string(first.join("chain_flat_n3.csv")).unwrap();
    let mut lines = header.lines();
    assert_eq!(lines.next(), Some("tau,time,population"));
    let row: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
    assert!(row[1].contains('e'), "floats use exponent form: {row:?}");
}

#[test]
fn flags_override_config_values() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"seed": 3, "experiment": {"kind": "chain", "profile": "flat", "n": [3, 5], "points": 21}}"#,
    )
    .unwrap();
    let out = tmp.path().join("o");
    assert_ok(&cqc(&["chain", "--config", path(&cfg), "--points", "31", "--seed", "4", "--out", path(&out)]));
    let s = summary(&out);
    assert_eq!(s["config"]["seed"], 4);
    assert_eq!(s["config"]["experiment"]["points"], 31);
    let rows = fs::read_to_string(out.join("chain_flat_n3.csv")).unwrap().lines().count();
    assert_eq!(rows, 32);
}

#[test]
fn invalid_inputs_exit_with_validation_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = path(&out);
    let cases: Vec<Vec<&str>> = vec![
        vec!["chain", "--profile", "triangle", "--n", "3", "--out", o],
        vec!["chain", "--profile", "flat", "--out", o],
        vec!["factor", "--z", "64", "--out", o],
        vec!["factor", "--modes", "0", "--out", o],
        vec!["grover", "--n", "3", "--n0", "8", "--out", o],
        vec!["grover", "--lambda", "1.5", "--out", o],
        vec!["factor", "--threads", "0", "--out", o],
    ];
    for args in cases {
        let r = cqc(&args);
        assert_eq!(r.status.code(), Some(cqc_cli::EXIT_VALIDATION), "{args:?}: {}", String::from_utf8_lossy(&r.stderr));
    }
}

#[test]
fn config_for_another_subcommand_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": {"kind": "chain", "profile": "flat", "n": [3]}}"#).unwrap();
    let r = cqc(&["factor", "--config", path(&cfg), "--out", path(&tmp.path().join("o"))]);
    assert_eq!(r.status.code(), Some(cqc_cli::EXIT_VALIDATION));
}

#[test]
fn unknown_config_field_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": {"kind": "chain", "profile": "flat", "n": [3], "lambda_typo": 1}}"#).unwrap();
    let r = cqc(&["chain", "--config", path(&cfg), "--out", path(&tmp.path().join("o"))]);
    assert_eq!(r.status.code(), Some(cqc_cli::EXIT_VALIDATION));
}

#[test]
fn bad_circuit_files_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let cases = [
        r#"[{"gate": "u", "targets": [0], "matrix": [[[1,0],[1,0]],[[0,0],[1,0]]]}]"#,
        r#"[{"gate": "cnot", "targets": [0, 0]}]"#,
        r#"[{"gate": "swap", "targets": [0, 1]}]"#,
        r#"{"gate": "x"}"#,
    ];
    for (i, text) in cases.iter().enumerate() {
        let file = tmp.path().join(format!("c{i}.json"));
        fs::write(&file, text).unwrap();
        let r = cqc(&["circuit", "--circuit", path(&file), "--out", path(&out)]);
        assert_eq!(r.status.code(), Some(cqc_cli::EXIT_VALIDATION), "{text}");
    }
}

#[test]
fn circuit_run_completes_with_high_fidelity() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("bell.json");
    fs::write(&file, r#"[{"gate": "h", "targets": [0]}, {"gate": "cnot", "targets": [0, 1]}, {"gate": "x", "targets": [1]}]"#)
        .unwrap();
    let out = tmp.path().join("o");
    assert_ok(&cqc(&["circuit", "--circuit", path(&file), "--seed", "5", "--out", path(&out)]));
    let s = summary(&out);
    let fidelity = s["results"]["fidelity"].as_f64().unwrap();
    assert!(fidelity > 0.99, "fidelity {fidelity}");
    let table = fs::read_to_string(out.join("circuit_clock.csv")).unwrap();
    assert!(table.starts_with("cycle,detected_mask,clock_0,clock_1,clock_2,clock_3\n"));
}

#[test]
fn factor_results_do_not_depend_on_thread_count() {
    let tmp = tempfile::tempdir().unwrap();
    let base = ["factor", "--z", "6", "--modes", "2", "--samples", "6", "--cycles", "8", "--propagator", "direct", "--seed", "9"];
    let mut runs = Vec::new();
    for threads in ["1", "3"] {
        let out = tmp.path().join(format!("t{threads}"));
        let mut args = base.to_vec();
        args.extend(["--threads", threads, "--out", path(&out)]);
        assert_ok(&cqc(&args));
        runs.push(out);
    }
    for name in ["factor_ensemble.csv", "factor_trajectories.csv"] {
        assert_eq!(fs::read(runs[0].join(name)).unwrap(), fs::read(runs[1].join(name)).unwrap(), "{name}");
    }
    let s = summary(&runs[0]);
    assert_eq!(s["results"]["trajectory_seeds"].as_array().unwrap().len(), 6);
}

#[test]
fn sweep_writes_one_block_per_coupling() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    assert_ok(&cqc(&[
        "sweep", "--lambdas", "0.05,0.1", "--z", "6", "--modes", "2", "--samples", "3", "--cycles", "4", "--propagator",
        "direct", "--out", path(&out),
    ]));
    let rows = fs::read_to_string(out.join("sweep.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 2 * 5);
}

#[test]
fn published_schema_matches_generated() {
    let r = cqc(&["schema"]);
    assert_ok(&r);
    let generated: Value = serde_json::from_slice(&r.stdout).unwrap();
    let published: Value =
        serde_json::from_str(include_str!("../schema/experiment-config.schema.json")).expect("schema file parses");
    assert_eq!(generated, published, "regenerate with `cqc schema > crates/cli/schema/experiment-config.schema.json`");
}
