use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use dp_core::scenario::{execute, io, parse_config};

fn dp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dp")).args(args).output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

fn summary_field(dir: &Path, key: &str) -> String {
    let text = fs::read_to_string(dir.join("summary.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    row[header.iter().position(|h| *h == key).unwrap()].to_string()
}

#[test]
fn sine_breaks_with_exit_code_two() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "sine.cfg", "initial = sine\nn = 256\nt_end = 0.3\n");
    let out_dir = tmp.path().join("out");
    let o = dp(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(summary_field(&out_dir, "classification"), "wave_breaking");
    assert_eq!(summary_field(&out_dir, "bound_respected"), "true");
    assert_eq!(summary_field(&out_dir, "scenario"), "sine");

    let trace = out_dir.join("trace.csv");
    let a = dp(&["audit", "--trace", trace.to_str().unwrap()]);
    let expected = if summary_field(&out_dir, "riccati_passed") == "true" { 0 } else { 4 };
    assert_eq!(a.status.code(), Some(expected));
}

#[test]
fn positive_momentum_completes_and_is_separated() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "pm.cfg",
        "name = pm\ninitial = positive_momentum\namplitude = 0.5\nn = 64\nt_end = 0.5\n",
    );
    let out_dir = tmp.path().join("o");
    let o = dp(&["run", "--config", &cfg, "--out", out_dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(summary_field(&out_dir, "liouville"), "separated");
    assert_eq!(summary_field(&out_dir, "contradiction"), "false");
    assert_eq!(summary_field(&out_dir, "sign_u"), "1");
    let o = dp(&["audit", "--trace", out_dir.join("trace.csv").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn constant_scenario_does_not_drift() {
    let s = parse_config("initial = constant\nvalue = -1.5\nkappa = 1.5\nn = 32\nt_end = 1\n").unwrap();
    let out = execute(&s).unwrap();
    for snap in &out.run.snapshots {
        assert!(snap.state.u.sup_distance(&out.initial) <= 1e-12);
    }
    assert_eq!(out.summary.exit_code(), 0);
    assert_eq!(out.summary.liouville.as_str(), "identically_flat");
}

#[test]
fn runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "f.cfg", "initial = fourier\nsin = 0.3, 0.1\ncos = 0.2\nn = 64\nt_end = 0.2\n");
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        dp(&["run", "--config", &cfg, "--out", d.to_str().unwrap()]);
    }
    for f in ["fields.csv", "trace.csv", "summary.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn fields_csv_feeds_a_samples_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "s.cfg", "initial = sine\namplitude = 0.2\nn = 32\nt_end = 0.1\n");
    let first = tmp.path().join("first");
    dp(&["run", "--config", &cfg, "--out", first.to_str().unwrap()]);
    let cfg2 = write_config(tmp.path(), "r.cfg", "initial = samples\npath = first/fields.csv\nn = 32\nt_end = 0.1\n");
    let second = tmp.path().join("second");
    let o = dp(&["run", "--config", &cfg2, "--out", second.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        fs::read_to_string(first.join("fields.csv")).unwrap(),
        fs::read_to_string(second.join("fields.csv")).unwrap()
    );
}

#[test]
fn overrides_and_scan() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.cfg", "initial = sine\namplitude = 0.01\nn = 64\n");
    let o = dp(&["scan", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(0));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("a,lhs,rhs,margin,h0\n"));
    assert!(stdout.contains("\n0.5,"));

    let flat = write_config(tmp.path(), "flat.cfg", "initial = constant\nvalue = 2\nn = 16\n");
    assert_eq!(dp(&["scan", "--config", &flat]).status.code(), Some(3));

    let out_dir = tmp.path().join("ov");
    let o = dp(&["run", "--config", &flat, "--out", out_dir.to_str().unwrap(), "--kappa", "-2", "--t-end", "0.05", "--n", "32"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(summary_field(&out_dir, "horizon"), "0.05");
    assert_eq!(summary_field(&out_dir, "liouville"), "identically_flat");
    let text = fs::read_to_string(out_dir.join("fields.csv")).unwrap();
    assert!(text.starts_with(&format!("{}\n", io::FIELDS_HEADER)));
    assert_eq!(text.lines().count(), 1 + 32 * 51);
}

#[test]
fn errors_exit_one_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "bad.cfg", "initial = sine\nn = eleven\n");
    let o = dp(&["run", "--config", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n"));
    let o = dp(&["run", "--config", tmp.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = dp(&["audit", "--trace", bad.as_str()]);
    assert_eq!(o.status.code(), Some(1));
}
