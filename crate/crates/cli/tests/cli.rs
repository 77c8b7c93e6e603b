use std::collections::HashSet;
use std::path::Path;
use std::process::{Command, Output};

use dsvac_cli::{Report, Suite, Verdict};

fn dsvac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsvac")).args(args).output().expect("binary runs")
}

fn read(p: &Path) -> Report {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn gravity_needs_k_max_two() {
    let o = dsvac(&["run", "--k-max", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("k_max"));
}

#[test]
fn maxwell_only_skips_gravity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m.json");
    let o = dsvac(&["run", "--k-max", "1", "--suites", "maxwell", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read(&out);
    assert!(!r.records.is_empty());
    assert!(r.records.iter().all(|x| x.suite == Suite::Maxwell));
    assert!(r.records.iter().all(|x| x.verdict == Verdict::Pass));
}

#[test]
fn stdout_report_is_byte_stable() {
    let args = ["run", "--k-max", "3", "--suites", "states,gauge"];
    let a = dsvac(&args);
    let b = dsvac(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_projection() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = dsvac(&["run", "--k-max", "2", "--suites", "symmetry", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("check_id,claim,suite,sector"));
    assert!(lines.all(|l| l.contains(",symmetry,")));
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.toml");
    std::fs::write(&cfg, "k_max = 1\nsuites = [\"maxwell\"]\nalpha_values = [0.5]\n[tolerances]\nverdict = 1e-8\n").unwrap();
    let out = dir.path().join("r.json");
    let o = dsvac(&["run", "--config", cfg.to_str().unwrap(), "--k-max", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = read(&out);
    assert_eq!(r.config.k_max, 2);
    assert_eq!(r.config.tolerances.verdict, 1e-8);
    assert_eq!(r.config.alpha_values, vec![0.5]);

    std::fs::write(&cfg, "k_max = \"three\"\n").unwrap();
    assert_eq!(dsvac(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&cfg, "unknown_field = 1\n").unwrap();
    assert_eq!(dsvac(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn missing_output_directory() {
    let o = dsvac(&["run", "--suites", "maxwell", "--out", "/nonexistent-dir/r.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn diff_cases() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let base = ["run", "--suites", "maxwell,states"];
    let run = |extra: &[&str], out: &str| {
        let mut a: Vec<&str> = base.to_vec();
        a.extend_from_slice(extra);
        a.extend_from_slice(&["--out", out]);
        dsvac(&a);
    };
    run(&["--k-max", "2"], &p("a.json"));
    run(&["--k-max", "2"], &p("b.json"));
    run(&["--k-max", "3"], &p("c.json"));
    run(&["--k-max", "2", "--tol-verdict", "1e-17"], &p("d.json"));

    let same = dsvac(&["diff", &p("a.json"), &p("b.json")]);
    assert_eq!(same.status.code(), Some(0));
    assert!(same.stdout.is_empty());

    let grown = dsvac(&["diff", &p("a.json"), &p("c.json")]);
    assert!(String::from_utf8_lossy(&grown.stdout).contains("new checks"));

    let tight = dsvac(&["diff", &p("a.json"), &p("d.json")]);
    assert_eq!(tight.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&tight.stdout).contains("pass -> fail"));

    let mut r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p("a.json")).unwrap()).unwrap();
    r["schema_version"] = serde_json::json!(999);
    std::fs::write(p("e.json"), r.to_string()).unwrap();
    assert_eq!(dsvac(&["diff", &p("a.json"), &p("e.json")]).status.code(), Some(2));
}

/// At small truncation every suite reports, check ids are unique, and the
/// only failures are the two Scalar(1) checks recorded as known.
#[test]
fn small_full_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = dsvac(&["run", "--k-max", "3", "--dynamics-k-max", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let r = read(&out);
    for s in Suite::ALL {
        assert!(r.records.iter().any(|x| x.suite == s), "{s} emitted nothing");
    }
    let ids: HashSet<&str> = r.records.iter().map(|x| x.check_id.as_str()).collect();
    assert_eq!(ids.len(), r.records.len());
    let failed: Vec<&str> = r.failures().map(|x| x.check_id.as_str()).collect();
    assert_eq!(failed, ["phase_space.direct_sum.three_way@Scalar(1)", "gauge.modified.full_invariance@Scalar(1)"]);
}
