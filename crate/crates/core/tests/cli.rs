use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn gaussvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gaussvol"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn kernels_table_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let (d1, d2) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&d1, &d2] {
        let o = gaussvol(&["kernels", "--a", "1.5", "--xmin", "-3", "--xmax", "3", "--step", "0.1", "--out", &out_arg(d)]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv = fs::read(d1.join("kernels.csv")).unwrap();
    assert_eq!(csv, fs::read(d2.join("kernels.csv")).unwrap());
    let text = String::from_utf8(csv).unwrap();
    assert!(text.starts_with("x,p,g,gamma,phi,fp_residual\n"));
    assert_eq!(text.lines().count(), 62);
    assert!(d1.join("run_meta.json").exists());
}

#[test]
fn experiment_outputs_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (d1, d2) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&d1, &d2] {
        let o = gaussvol(&[
            "experiment", "--preset", "thm2-detectable", "--n", "3601", "--trials", "100",
            "--seed", "42", "--format", "json,jsonl", "--out", &out_arg(d),
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
        assert!(String::from_utf8_lossy(&o.stdout).contains("PASS thm2-detectable/overlap_zero"));
    }
    for name in ["summary.json", "trials.jsonl"] {
        assert_eq!(fs::read(d1.join(name)).unwrap(), fs::read(d2.join(name)).unwrap(), "{name}");
    }
    let trials = fs::read_to_string(d1.join("trials.jsonl")).unwrap();
    assert_eq!(trials.lines().count(), 100);
    let first: serde_json::Value = serde_json::from_str(trials.lines().next().unwrap()).unwrap();
    assert_eq!(first["trial_index"], 0);
    assert!(first["theta"]["rle"].is_string());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(d1.join("run_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 42);
    assert!(meta["wall_time_seconds"].is_number());
}

#[test]
fn undersized_n_exits_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = gaussvol(&[
        "experiment", "--preset", "thm2-detectable", "--n", "100", "--seed", "42", "--out", &out_arg(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("`n`") && err.contains("3601"), "{err}");
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let out = out_arg(tmp.path());
    let config = tmp.path().join("bad.json");
    fs::write(&config, r#"{"n": 4000, "bogus": 1}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["experiment", "--preset", "thm2-detectable", "--out", &out],
        vec!["experiment", "--preset", "thm2-detectable", "--seed", "1", "--format", "xml", "--out", &out],
        vec!["experiment", "--preset", "thm2-detectable", "--config", config.to_str().unwrap(), "--seed", "1", "--out", &out],
        vec!["experiment", "--preset", "coupling-validation", "--epsilon", "0.8", "--seed", "1", "--out", &out],
        vec!["experiment", "--preset", "phase-t", "--seed", "1", "--out", &out],
        vec!["kernels", "--a", "1", "--xmin", "-40", "--out", &out],
        vec!["kernels", "--a", "-1", "--out", &out],
        vec!["experiment", "--preset", "nope", "--seed", "1"],
    ];
    for args in cases {
        let o = gaussvol(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_file_overrides_preset() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("spec.json");
    fs::write(&config, r#"{"n": 800, "trials": 40, "master_seed": 3}"#).unwrap();
    let out = tmp.path().join("run");
    let o = gaussvol(&[
        "experiment", "--preset", "thm2-undetectable", "--config", config.to_str().unwrap(),
        "--format", "json", "--out", &out_arg(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["spec"]["n"], 800);
    assert_eq!(summary["spec"]["trials"], 40);
    assert_eq!(summary["spec"]["master_seed"], 3);
}

#[test]
fn sweep_writes_plot_ready_csv() {
    let tmp = tempfile::tempdir().unwrap();
    let o = gaussvol(&[
        "sweep", "--preset", "phase-t", "--trials", "50", "--seed", "4", "--out", &out_arg(tmp.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let csv = fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 14);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("t,")));
}

#[test]
fn demos_run() {
    for cmd in ["attack", "detect"] {
        let o = gaussvol(&[cmd, "--a", "2", "--n", "4000", "--seed", "7"]);
        assert_eq!(o.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(gaussvol(&["attack"]).status.code(), Some(2));
}
