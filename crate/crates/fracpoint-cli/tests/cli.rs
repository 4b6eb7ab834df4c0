//! End-to-end checks of the `fracpoint` binary: registry, exit codes,
//! output formats, config precedence and byte-level reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracpoint"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn fracpoint")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("fracpoint-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn registry_has_exactly_eight_experiments() {
    let out = run(&["list"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let names: Vec<&str> = text.lines().collect();
    assert_eq!(
        names,
        ["hitting", "pmf", "sample", "iterate", "multi", "ggbm", "renewal", "fracop-check"]
    );
}

#[test]
fn help_exits_zero_and_bare_invocation_exits_two() {
    let help = run(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let bare = bin().output().expect("spawn");
    assert_eq!(bare.status.code(), Some(2));
}

#[test]
fn unknown_experiment_name_is_rejected() {
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_process_spec_exits_two_with_message() {
    let out = run(&["pmf", "--process", "nonsense:1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nonsense"), "stderr: {err}");
}

#[test]
fn out_of_range_parameters_exit_two() {
    let out = run(&["pmf", "--process", "spacetime:1.5,0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["renewal", "--family", "spacetime", "--alpha", "0.5", "--nu", "0.6", "--grid-min", "5", "--grid-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numeric_guard_escalates_to_exit_three() {
    // the tempered-stable rejection sampler refuses runs whose expected
    // retry count is astronomical
    let out = run(&[
        "multi",
        "--fs",
        "tempered:0.5,1",
        "--t",
        "100000",
        "--n-samples",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("retries"), "stderr: {err}");
}

#[test]
fn pmf_csv_shape_matches_interface() {
    let out = run(&["pmf", "--process", "stable:1.0", "--lambda", "1", "--t", "1", "--k-max", "20"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# fracpoint"));
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "k,probability");
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("tail,"), "last line: {last}");
    // Poisson(1) head: p0 = p1 = exp(-1)
    let p0: f64 = text
        .lines()
        .find(|l| l.starts_with("0,"))
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert!((p0 - (-1.0f64).exp()).abs() < 1e-12);
}

#[test]
fn hitting_csv_has_interface_columns_and_exact_values() {
    let out = run(&[
        "hitting", "--alpha", "0.5", "--k-max", "2", "--n-samples", "20000", "--seed", "7",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "alpha,k,exact,asymptotic,mc_estimate,mc_stderr");
    let row1: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("0.5,1,"))
        .unwrap()
        .split(',')
        .collect();
    let exact: f64 = row1[2].parse().unwrap();
    assert!((exact - 0.5).abs() < 1e-12);
}

#[test]
fn json_format_is_a_mirror() {
    let out = run(&[
        "pmf", "--process", "gamma:1", "--t", "1", "--format", "json", "--k-max", "64",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(doc["columns"], serde_json::json!(["k", "probability"]));
    let rows = doc["rows"].as_array().unwrap();
    assert!(rows.len() > 10);
    assert_eq!(rows.last().unwrap()[0], "tail");
    let meta = doc["metadata"].as_array().unwrap();
    assert!(meta.iter().any(|m| m["key"] == "experiment" && m["value"] == "pmf"));
}

#[test]
fn byte_identical_reruns_and_thread_independence() {
    let args = [
        "sample",
        "--process",
        "space:0.7",
        "--t",
        "1",
        "--n-samples",
        "40000",
        "--seed",
        "11",
        "--k-max",
        "20",
    ];
    let a = tmp("rerun-a.csv");
    let b = tmp("rerun-b.csv");
    let c = tmp("rerun-c.csv");
    assert!(bin().args(args).arg("-o").arg(&a).arg("--threads").arg("1").status().unwrap().success());
    assert!(bin().args(args).arg("-o").arg(&b).arg("--threads").arg("1").status().unwrap().success());
    assert!(bin().args(args).arg("-o").arg(&c).arg("--threads").arg("4").status().unwrap().success());
    let ba = std::fs::read(&a).unwrap();
    let bb = std::fs::read(&b).unwrap();
    let bc = std::fs::read(&c).unwrap();
    assert_eq!(ba, bb, "rerun changed bytes");
    assert_eq!(ba, bc, "thread count changed bytes");
    let _ = std::fs::remove_file(a);
    let _ = std::fs::remove_file(b);
    let _ = std::fs::remove_file(c);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let cfg = tmp("config.txt");
    std::fs::write(
        &cfg,
        "# demo config\nexperiment = pmf\nprocess = gamma:1\nt = 1\nk_max = 32\n",
    )
    .unwrap();
    let out = bin()
        .args(["pmf", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("# process = gamma:1"));

    // a flag overrides the config value
    let out = bin()
        .args(["pmf", "--config"])
        .arg(&cfg)
        .args(["--process", "linear"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("# process = linear"));

    // config pinned to another experiment is rejected
    let out = bin().args(["sample", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let _ = std::fs::remove_file(cfg);
}

#[test]
fn unwritable_output_path_exits_two() {
    let out = run(&[
        "pmf",
        "--process",
        "linear",
        "--k-max",
        "16",
        "-o",
        "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_reports_chi_square_against_exact_pmf() {
    let out = run(&[
        "sample", "--process", "gamma:1", "--t", "1", "--n-samples", "40000", "--seed", "3",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let p_line = text
        .lines()
        .find(|l| l.starts_with("# chi_square_p_value"))
        .expect("chi-square metadata");
    let p: f64 = p_line.split('=').nth(1).unwrap().trim().parse().unwrap();
    assert!(p > 0.001, "p = {p}");
}

#[test]
fn renewal_ratio_column_is_alpha() {
    let out = run(&[
        "renewal", "--alpha", "0.5", "--nu", "0.6", "--k", "1", "--grid-points", "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    for line in text.lines().filter(|l| !l.starts_with('#') && !l.starts_with("gamma")) {
        let ratio: f64 = line.split(',').nth(4).unwrap().parse().unwrap();
        assert!((ratio - 0.5).abs() < 1e-10, "{line}");
    }
}
