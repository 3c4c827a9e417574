//! End-to-end tests of the binary: flag parsing, report formats, exit codes,
//! and reproducibility.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rkhs-douglas"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rkhs-douglas-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write(dir: &std::path::Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn verify_identity_passes_and_reports_json() {
    let out = bin()
        .args(["verify-identity", "--lemma", "4.2", "--n", "2", "--degree", "10"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["exact_zero"], true);
    assert_eq!(v["report"]["lemma_id"], "4.2");
    assert_eq!(v["config"]["command"], "verify-identity");
}

#[test]
fn np_test_falsifies_sandwich_kernel_and_expect_pass_fails() {
    let dir = tmp_dir("np");
    let pts = write(&dir, "pts.csv", "0.9,0\n-0.9,0\n");
    let out = bin()
        .args(["np-test", "--kernel", "example51", "--points"])
        .arg(&pts)
        .args(["--base", "0,0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["is_psd"], false);
    assert!(v["report"]["min_eigenvalue"].as_f64().unwrap() < -7.0);

    let out = bin()
        .args(["np-test", "--kernel", "example51", "--points"])
        .arg(&pts)
        .arg("--expect-pass")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tmp_dir("rerun");
    let pts = write(&dir, "pts.csv", "0.25,0.125\n-0.5,0.25\n0.1,-0.7\n");
    let run = |path: &std::path::Path| {
        let out = bin()
            .args(["np-test", "--kernel", "bergman_disk", "--points"])
            .arg(&pts)
            .args(["--seed", "42", "--output"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    };
    let first = dir.join("a.json");
    let second = dir.join("b.json");
    run(&first);
    run(&second);
    let a = std::fs::read(&first).unwrap();
    let b = std::fs::read(&second).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["config"]["seed"], 42);
    assert_eq!(v["report"]["seed"], 42);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tmp_dir("env");
    let pts = write(&dir, "pts.csv", "0.3,0\n");
    let out = bin()
        .args(["gram", "--kernel", "szego_disk", "--points"])
        .arg(&pts)
        .env("RKHS_DOUGLAS_SEED", "777")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["seed"], 777);
    assert_eq!(v["report"]["seed"], 777);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tmp_dir("config");
    let pts = write(&dir, "pts.csv", "0.3,0\n");
    let config = write(&dir, "config.json", r#"{"tolerance": 1e-8, "seed": 5}"#);
    let out = bin()
        .arg("--config")
        .arg(&config)
        .args(["--seed", "6", "gram", "--kernel", "szego_disk", "--points"])
        .arg(&pts)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["config"]["seed"], 6);
    assert_eq!(v["config"]["tolerance"], 1e-8);
}

#[test]
fn douglas_solve_round_trip() {
    let dir = tmp_dir("douglas");
    let a = write(&dir, "a.json", "[[[1,0],[0,0]],[[0,0],[0.5,0]]]");
    let b = write(&dir, "b.json", "[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]");
    let out = bin()
        .arg("douglas-solve")
        .arg("--a")
        .arg(&a)
        .arg("--b")
        .arg(&b)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["majorized"], true);
    assert_eq!(v["report"]["feasible"], true);
    let norm = v["report"]["solution_norm"].as_f64().unwrap();
    assert!((norm - 1.0).abs() < 1e-9);
    // Minimal solution diag(1/2, 1).
    assert_eq!(v["report"]["solution"][0][0][0], 0.5);
    assert_eq!(v["report"]["solution"][1][1][0], 1.0);
}

#[test]
fn corona_check_accepts_polynomial_files() {
    let dir = tmp_dir("corona");
    let pts = write(&dir, "pts.csv", "0.2,0.1,-0.3,0\n0.4,0,0.1,0.2\n");
    let phi = write(
        &dir,
        "phi.json",
        r#"{"rows":1,"cols":2,"vars":2,"entries":[
            {"vars":2,"terms":[{"exps":[0,0],"coeff":["1","0"]}]},
            {"vars":2,"terms":[{"exps":[1,1],"coeff":["1","0"]}]}
        ]}"#,
    );
    let psi = write(
        &dir,
        "psi.json",
        r#"{"rows":1,"cols":2,"vars":2,"entries":[
            {"vars":2,"terms":[{"exps":[1,0],"coeff":["1","0"]}]},
            {"vars":2,"terms":[{"exps":[0,1],"coeff":["1","0"]}]}
        ]}"#,
    );
    let out = bin()
        .arg("corona-check")
        .arg("--phi")
        .arg(&phi)
        .arg("--psi")
        .arg(&psi)
        .args(["--kernel", "hardy_bidisk", "--points"])
        .arg(&pts)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["verdict"]["is_psd"], true);
}

#[test]
fn np_oracle_reads_kernel_files() {
    let dir = tmp_dir("oracle");
    let kernel = write(
        &dir,
        "kernel.json",
        r#"{"variant":"diagonal","coeffs":["1","2","2"],"domain_radius":1.0}"#,
    );
    let out = bin()
        .args(["np-oracle", "--order", "3", "--kernel"])
        .arg(&kernel)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["is_np_at_order"], false);
    assert_eq!(v["report"]["first_failing_index"], 2);
}

#[test]
fn growth_report_csv_format() {
    let out = bin()
        .args(["growth-report", "--n-max", "2", "--grid", "8", "--format", "csv"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,lower_bound,achieved_norm,optimal"));
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(1).unwrap().starts_with("1,1.414213562373095"));
}

#[test]
fn counterexample_certificate() {
    let out = bin()
        .args(["counterexample", "--n", "3", "--grid", "8"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["report"]["l2_lower_bound"], "4");
    assert_eq!(v["report"]["optimal"], true);
    assert!((v["report"]["achieved_norm"].as_f64().unwrap() - 2.0).abs() < 1e-10);
}

#[test]
fn exit_codes_for_bad_input() {
    // Unknown subcommand: usage error.
    let out = bin().arg("no-such-command").output().unwrap();
    assert_eq!(out.status.code(), Some(64));

    // Unreadable points file: usage error.
    let out = bin()
        .args(["gram", "--kernel", "szego_disk", "--points", "/nonexistent.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));

    // Malformed CSV: usage error with a line number.
    let dir = tmp_dir("badcsv");
    let pts = write(&dir, "pts.csv", "0.1,0\nnot-a-number,0\n");
    let out = bin()
        .args(["gram", "--kernel", "szego_disk", "--points"])
        .arg(&pts)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    // Out-of-domain point: data error.
    let pts = write(&dir, "outside.csv", "2.0,0\n");
    let out = bin()
        .args(["np-test", "--kernel", "szego_disk", "--points"])
        .arg(&pts)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(65));

    // csv format is growth-report-only.
    let pts = write(&dir, "ok.csv", "0.1,0\n");
    let out = bin()
        .args(["gram", "--kernel", "szego_disk", "--format", "csv", "--points"])
        .arg(&pts)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn output_file_is_written_atomically_with_summary() {
    let dir = tmp_dir("output");
    let pts = write(&dir, "pts.csv", "0.5,0\n0.25,0\n");
    let report = dir.join("report.json");
    let out = bin()
        .args(["np-test", "--kernel", "bergman_disk", "--points"])
        .arg(&pts)
        .arg("--output")
        .arg(&report)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(stdout(&out).contains("not PSD"));
    assert!(report.exists());
    assert!(!dir.join("report.tmp").exists());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["report"]["is_psd"], false);
}

#[test]
fn help_and_version_exit_zero() {
    assert!(bin().arg("--help").output().unwrap().status.success());
    assert!(bin().arg("--version").output().unwrap().status.success());
}
