use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sl3t(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sl3t"))
        .env("SL3T_OUT_DIR", dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn kak_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let o = sl3t(dir.path(), &["kak", "--matrix", "1", "0", "0", "0", "1", "0", "0", "0", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("kak.json")).unwrap()).unwrap();
    assert_eq!(v["a"], serde_json::json!([0.0, 0.0, 0.0]));
    assert_eq!(v["residual"], 0.0);
    assert!(dir.path().join("kak.manifest.json").exists());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(sl3t(dir.path(), &["no-such-command"]).status.code(), Some(2));
    assert_eq!(sl3t(dir.path(), &["kak", "--matrix", "1", "2"]).status.code(), Some(2));
    assert_eq!(sl3t(dir.path(), &["zigzag", "--epsilon", "1.5"]).status.code(), Some(2));
    // determinant 2 is bad input, determinant 0 is a degenerate matrix
    assert_eq!(
        sl3t(dir.path(), &["kak", "--matrix", "1", "0", "0", "0", "1", "0", "0", "0", "2"]).status.code(),
        Some(2)
    );
    let o = sl3t(dir.path(), &["kak", "--matrix", "1", "0", "0", "0", "1", "0", "0", "0", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("singular"));
    assert_eq!(sl3t(dir.path(), &["schatten-probe"]).status.code(), Some(2));
}

#[test]
fn zigzag_summary_reports_tail_constant() {
    let dir = tempfile::tempdir().unwrap();
    let o = sl3t(dir.path(), &["zigzag", "--s", "0.5", "--t", "0", "--C", "4", "--L", "1"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("C' = 100.565"), "{}", stdout(&o));
    let csv = fs::read_to_string(dir.path().join("zigzag_profile.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with('#'));
    assert!(csv.lines().any(|l| l == "alpha,bound"));
}

#[test]
fn out_dir_flag_overrides_environment() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = sl3t(
        env_dir.path(),
        &["--out-dir", flag_dir.path().to_str().unwrap(), "invariant-gap", "--jmax", "2"],
    );
    assert!(o.status.success());
    assert!(flag_dir.path().join("invariant_gap.csv").exists());
    assert!(!env_dir.path().join("invariant_gap.csv").exists());
}

#[test]
fn reruns_and_replays_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let args = ["markov", "--delta", "-0.6", "--steps", "8", "--replicas", "3000", "--seed", "11"];
    assert!(sl3t(a.path(), &args).status.success());
    assert!(sl3t(b.path(), &args).status.success());
    let manifest = a.path().join("markov.manifest.json");
    assert!(sl3t(c.path(), &["replay", manifest.to_str().unwrap()]).status.success());
    for f in ["markov_profile.csv", "markov_trace.csv", "markov.manifest.json"] {
        let x = fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, fs::read(b.path().join(f)).unwrap(), "{f}");
        assert_eq!(x, fs::read(c.path().join(f)).unwrap(), "{f}");
    }
    let m: serde_json::Value = serde_json::from_slice(&fs::read(manifest).unwrap()).unwrap();
    assert_eq!(m["seed"], 11);
}

#[test]
fn csv_floats_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    assert!(sl3t(dir.path(), &["legendre-bounds", "--nmax", "50", "--grid", "11"]).status.success());
    let csv = fs::read_to_string(dir.path().join("legendre_bounds.csv")).unwrap();
    let row = csv.lines().find(|l| !l.starts_with('#') && !l.starts_with("delta")).unwrap();
    let first = row.split(',').next().unwrap();
    assert_eq!(first, "-1.0000000000000000e0");
    assert_eq!(first.parse::<f64>().unwrap(), -1.0);
}

#[test]
fn howe_moore_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = sl3t(dir.path(), &["howe-moore", "--band-limit", "8", "--nmax", "4"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(dir.path().join("howe_moore.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "n,c_n,bound,leakage"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 6);
}

#[test]
fn check_all_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = sl3t(dir.path(), &["check-all"]);
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("PASS")).count(), 12, "{out}");
    assert_eq!(o.status.code(), Some(0));
}
