use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coded-shift")).args(args).output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("coded-shift-{}-{name}", std::process::id()));
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn output_is_byte_identical_across_runs() {
    for args in [
        &["analyze", "builtin:dyck"][..],
        &["analyze", "builtin:ex_null_recurrent"],
        &["enumerate", "builtin:golden_mean_code", "--n", "5"],
        &["genfun", "eval", "builtin:ex_positive_recurrent", "--alpha", "0.6931471805599453"],
    ] {
        assert_eq!(run(args).stdout, run(args).stdout, "{args:?}");
    }
}

#[test]
fn analyze_dyck() {
    let v = json(&["analyze", "builtin:dyck"]);
    let r = &v["result"];
    assert_eq!(r["regime"], "below_one");
    assert_eq!(r["h_x"]["lower"].as_f64().unwrap(), 3f64.ln());
    let f = &r["f_at_h_l"];
    assert!(f["lower"].as_f64().unwrap() <= 1.0 / 3.0 && 1.0 / 3.0 <= f["upper"].as_f64().unwrap());
    assert_eq!(v["provenance"][0]["source"], "paper-exact");
}

#[test]
fn sft_entropy_golden_file() {
    let path = temp_file("golden.sft", "# golden mean\nletters: 0 1\nforbid: 1 1\n");
    let v = json(&["sft-entropy", path.to_str().unwrap(), "--letter", "0"]);
    let h = v["result"]["h_loop"].as_f64().unwrap();
    assert!((h - ((1.0 + 5f64.sqrt()) / 2.0).ln()).abs() < 1e-9);
    assert_eq!(v["result"]["agreement"], true);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn check_code_reports_witness() {
    let path = temp_file("code.txt", "alphabet: 0 1\nword: 1\nword: 10\nword: 01\n");
    let v = json(&["check-code", path.to_str().unwrap()]);
    let verdict = &v["result"]["verdict"];
    assert_eq!(verdict["kind"], "fails");
    assert_eq!(verdict["witness"]["word"], "101");
    std::fs::remove_file(path).unwrap();
}

#[test]
fn exit_codes() {
    let usage = run(&["analyze"]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));

    let domain = run(&["analyze", "builtin:no_such_family"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).starts_with("error: "));
    assert!(domain.stdout.is_empty());

    let bad = run(&["verify-bounds", "builtin:dyck", "--which", "aux2", "--alpha", "1.0", "--t", "8"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn verify_paper_passes() {
    let v = json(&["verify-paper"]);
    let checks = v["result"]["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks.iter().all(|c| c["pass"] == true), "{checks:#?}");
}
