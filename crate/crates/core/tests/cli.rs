use std::path::PathBuf;
use std::process::{Command, Output};

use torus_obs::cli::{digest_hex, read_manifests, replay};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_torus-obs"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("torus-obs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    let _ = std::fs::remove_file(&p);
    p
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["sphere", "--help"]).status.code(), Some(0));
    let bad = run(&["sphere", "--dim", "1", "--norm", "5"]);
    assert_eq!(bad.status.code(), Some(2));
    let err = String::from_utf8(bad.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: usage:"));
    let empty = run(&["observability", "--dim", "3", "--norm", "7", "--r", "0.2"]);
    assert_eq!(empty.status.code(), Some(3));
    assert_eq!(String::from_utf8(empty.stderr).unwrap().lines().count(), 1);
    assert_eq!(run(&["family", "--kind", "hyperplane", "--dim", "3", "--k", "0.5", "--r", "0.1"]).status.code(), Some(3));
}

#[test]
fn csv_and_json_agree_on_the_circle_of_radius_five() {
    let json = run(&["sphere", "--dim", "2", "--norm", "25"]);
    assert!(json.status.success());
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["count"], 12);
    let csv = run(&["sphere", "--dim", "2", "--norm", "25", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x1,x2"));
    assert_eq!(lines.count(), 12);
}

#[test]
fn out_file_matches_stdout() {
    let path = scratch("gamma.json");
    let args = ["gamma", "--dim", "2", "--norm", "65"];
    let direct = run(&args);
    let mut with_out: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap();
    with_out.extend(["--out", p]);
    let o = run(&with_out);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn manifest_round_trip_and_replay() {
    let manifest = scratch("runs.jsonl");
    let m = manifest.to_str().unwrap();
    let a = run(&["turan", "--mode", "trials", "--trials", "12", "--seed", "7", "--manifest", m]);
    let b = run(&["observability", "--dim", "2", "--norm", "25", "--r", "0.1,0.5", "--manifest", m]);
    assert!(a.status.success() && b.status.success());
    let runs = read_manifests(&manifest).unwrap();
    assert_eq!(runs.len(), 2);
    assert_eq!(runs[0].seed, Some(7));
    assert_eq!(runs[1].seed, None);
    assert_eq!(runs[0].digest, digest_hex(std::str::from_utf8(&a.stdout).unwrap()));
    assert_eq!(runs[0].params["command"], "turan");
    for r in &runs {
        let (digest, same) = replay(r).unwrap();
        assert!(same, "{} vs {}", digest, r.digest);
    }
    let mut tampered = runs[1].clone();
    tampered.digest = "00".repeat(32);
    assert!(!replay(&tampered).unwrap().1);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["turan", "--mode", "trials", "--trials", "16"];
    let one = bin().args(args).env("TORUS_OBS_THREADS", "1").output().unwrap();
    let many = bin().args(args).env("TORUS_OBS_THREADS", "4").output().unwrap();
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let bad = bin().args(args).env("TORUS_OBS_THREADS", "0").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn jarnik_reports_progress_on_stderr() {
    let o = run(&["jarnik", "--n-max", "200", "--violations-only"]);
    assert!(o.status.success());
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.lines().any(|l| l.starts_with("jarnik:")));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 0);
}

#[test]
fn every_subcommand_runs() {
    let cases: &[&[&str]] = &[
        &["sphere", "--dim", "3", "--norm", "9", "--cap-radius", "2"],
        &["gamma", "--dim", "2", "--norm", "25", "--kernel-order", "5"],
        &["cluster", "--mode", "partition", "--dim", "2", "--norm", "25", "--rho", "1.5"],
        &["cluster", "--mode", "connes", "--dim", "3", "--norm", "9"],
        &["cluster", "--mode", "decomposition", "--dim", "2", "--norm", "325", "--rho", "5", "--r", "0.1"],
        &["turan", "--mode", "ratio", "--power", "3", "--r", "0.5"],
        &["turan", "--mode", "extremal", "--n-max", "2", "--r", "0.5"],
        &["family", "--kind", "simple", "--dim", "3", "--index", "10", "--r", "0.05"],
        &["family", "--kind", "wigert", "--m", "13", "--r", "0.1"],
        &["bounds", "--kind", "upper", "--count", "12", "--diam", "10", "--order", "5", "--r", "0.05"],
        &["bounds", "--kind", "exponents", "--dim", "4", "--r", "0.01"],
    ];
    for args in cases {
        for format in ["json", "csv"] {
            let mut full = args.to_vec();
            full.extend(["--format", format]);
            let o = run(&full);
            assert!(o.status.success(), "{full:?}: {}", String::from_utf8_lossy(&o.stderr));
            assert!(!o.stdout.is_empty());
        }
    }
}
