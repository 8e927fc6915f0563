use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn malab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_malab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

const MANUFACTURED_N1: &str = r#"{
    "schema_version": 1,
    "experiment": {"kind": "solve", "refine": true},
    "domain": {"n": 1, "resolution": 64},
    "rhs": {"kind": "manufactured", "potential": {"terms": [
        {"coef": -0.03, "k": [1, 0], "phase": 0.0},
        {"coef": 0.005, "k": [1, 1], "phase": 0.5}
    ]}}
}"#;

#[test]
fn solve_manufactured_n1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", MANUFACTURED_N1);
    let out = tmp.path().join("out");
    let o = malab(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("residual_sup:"));
    let r = report(&out);
    assert!(r["residual_sup"].as_f64().unwrap() <= 1e-10);
    assert!(r["exact_error"].as_f64().unwrap() <= 1e-12);
    assert!(r["refined_residual"].as_f64().unwrap() <= 1e-10);
    for f in ["phi.bin", "phi.json", "rhs.bin", "history.csv", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let phi = malab_core::io::read_field(&out.join("phi.bin")).unwrap();
    assert_eq!(phi.domain().resolution(), 64);
}

#[test]
fn moduli_check_reports_closed_form_dini() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "experiment": {"kind": "moduli_check",
            "moduli": [{"family": "hoelder", "a": 1.0, "alpha": 0.5}]}}"#,
    );
    let out = tmp.path().join("out");
    let o = malab(&["moduli", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let r = report(&out);
    let dini = r["moduli"][0]["dini2"]["value"].as_f64().unwrap();
    assert!((dini - 1.0).abs() <= 1e-8);
    let manifest: Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    let rq = &manifest["derived"]["r_q"][0]["r_q"];
    assert_eq!(rq.as_array().unwrap().len(), 3);
    let csv = fs::read_to_string(out.join("moduli.csv")).unwrap();
    assert!(csv.starts_with("modulus,dini2,iteration_sum,bound,rescaled_bound,holds,holds_rescaled\n"));
}

#[test]
fn malformed_json_exits_with_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", "{\"schema_version\": 1, ");
    let o = malab(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "config");
}

#[test]
fn unknown_key_is_named_in_the_error() {
    let tmp = tempfile::tempdir().unwrap();
    let text = MANUFACTURED_N1.replace("\"refine\"", "\"refinee\"");
    let cfg = write_config(tmp.path(), "c.json", &text);
    let o = malab(&["solve", "--config", cfg.to_str().unwrap(), "--out", "unused"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert!(err["message"].as_str().unwrap().contains("refinee"), "{err}");
    assert_eq!(err["key"], "experiment");
    assert!(!Path::new("unused").exists());
}

#[test]
fn wrong_type_names_the_key_path() {
    let tmp = tempfile::tempdir().unwrap();
    let text = MANUFACTURED_N1.replace("\"resolution\": 64", "\"resolution\": -4");
    let cfg = write_config(tmp.path(), "c.json", &text);
    let o = malab(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["key"], "domain.resolution");
}

#[test]
fn subcommand_must_match_experiment_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", MANUFACTURED_N1);
    let o = malab(&["ladder", "--config", cfg.to_str().unwrap(), "--out", "x"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["key"], "experiment.kind");
}

#[test]
fn missing_output_directory_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.json", MANUFACTURED_N1);
    let o = malab(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["key"], "output_dir");
}

#[test]
fn numerical_failure_exits_with_code_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "experiment": {"kind": "solve"},
            "domain": {"n": 2, "resolution": 8},
            "rhs": {"kind": "trig_poly", "amplitude": 0.5, "frequencies": [[1, 0, 0, 0]]},
            "solver": {"max_newton": 1}}"#,
    );
    let out = tmp.path().join("out");
    let o = malab(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["error"], "numerical");
    assert!(err["diagnostic"]["last"]["residual_sup"].as_f64().unwrap() > 0.0);
    assert!(out.join("failure.json").exists());
}

#[test]
fn seed_flag_overrides_config_and_report_summarizes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "experiment": {"kind": "skoda_companion"},
            "domain": {"n": 1, "resolution": 64},
            "rhs": {"kind": "weierstrass", "alpha": 0.5, "levels": 4, "amplitude": 0.3, "seed": 2},
            "seed": 3}"#,
    );
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    let run = |dir: &Path, seed: Option<&str>| {
        let mut args = vec!["skoda", "--config", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()];
        if let Some(s) = seed {
            args.extend(["--seed", s]);
        }
        assert!(malab(&args).status.success());
    };
    run(&a, None);
    run(&b, Some("3"));
    run(&c, Some("4"));
    let phi = |d: &Path| fs::read(d.join("phi.bin")).unwrap();
    assert_eq!(phi(&a), phi(&b));
    assert_ne!(phi(&a), phi(&c));
    let o = malab(&["report", "--out", c.to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("[skoda_companion] seed=4"), "{text}");
}

/// Data files of two runs, excluding the manifest (which holds timing).
fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.file_name().unwrap() != "manifest.json")
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

#[test]
fn reruns_and_thread_counts_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.json",
        r#"{"schema_version": 1, "experiment": {"kind": "diff_ineq"},
            "domain": {"n": 2, "resolution": 8},
            "rhs": {"kind": "weierstrass", "alpha": 0.5, "levels": 1, "amplitude": 0.1, "seed": 8}}"#,
    );
    let dirs: Vec<PathBuf> = ["t1", "t1b", "t3"].iter().map(|d| tmp.path().join(d)).collect();
    for (dir, threads) in dirs.iter().zip(["1", "1", "3"]) {
        let o = malab(&[
            "ineq",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.to_str().unwrap(),
            "--threads",
            threads,
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let first = data_files(&dirs[0]);
    assert!(!first.is_empty());
    assert_eq!(first, data_files(&dirs[1]));
    assert_eq!(first, data_files(&dirs[2]));
}
