use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_breather"));
    c.arg("--quiet");
    c
}

fn shipped(name: &str) -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// A coarser copy of the shipped slab config, written into `dir`.
fn small_config(dir: &Path, edit: impl FnOnce(&mut Value)) -> PathBuf {
    let mut v = shipped("slab_periodic.json");
    v["grid"]["cells"] = 256.into();
    v["k_max"] = 6.into();
    v["time_samples"] = 32.into();
    edit(&mut v);
    let path = dir.join("run.json");
    fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn solve(dir: &Path, config: &Path, extra: &[&str]) -> (PathBuf, Output) {
    let out_dir = dir.join("out");
    let out = run(bin()
        .args(["solve", "--config"])
        .arg(config)
        .arg("--out")
        .arg(&out_dir)
        .args(extra));
    (out_dir, out)
}

#[test]
fn validate_accepts_the_shipped_configs() {
    for name in ["slab_periodic.json", "cylinder_delta.json"] {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
        let out = run(bin().args(["validate", "--config"]).arg(&path));
        assert_eq!(code(&out), 0, "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(report.is_object());
    }
}

#[test]
fn validate_rejects_a_speed_outside_the_gap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), |v| v["material"]["c"] = 0.95.into());
    let out = run(bin().args(["validate", "--config"]).arg(&cfg));
    assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{ \"version\": 1, ").unwrap();
    let out = run(bin().args(["validate", "--config"]).arg(&path));
    assert_eq!(code(&out), 2);
    let unknown = small_config(dir.path(), |v| v["surprise"] = true.into());
    assert_eq!(code(&run(bin().args(["validate", "--config"]).arg(&unknown))), 2);
}

#[test]
fn solve_writes_artifacts_and_report_is_read_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), |_| {});
    let (out_dir, out) = solve(dir.path(), &cfg, &[]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    for f in [
        "config.json",
        "u.field",
        "w.field",
        "solve_report.json",
        "fields.csv",
        "fields.json",
        "residual_report.json",
    ] {
        assert!(out_dir.join(f).is_file(), "missing {f}");
    }
    let residual: Value = serde_json::from_slice(&fs::read(out_dir.join("residual_report.json")).unwrap()).unwrap();
    assert!(residual["suite"]["checks"].as_array().unwrap().len() >= 10);

    let snapshot = |d: &Path| -> Vec<(String, Vec<u8>)> {
        let mut v: Vec<_> = fs::read_dir(d)
            .unwrap()
            .map(|e| e.unwrap())
            .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
            .collect();
        v.sort();
        v
    };
    let before = snapshot(&out_dir);
    let plots = dir.path().join("plots");
    let rep = run(bin().args(["report", "--out"]).arg(&out_dir).arg("--plots").arg(&plots));
    assert_eq!(code(&rep), 0, "{}", String::from_utf8_lossy(&rep.stderr));
    assert_eq!(before, snapshot(&out_dir));
    for f in ["modes.csv", "profiles.csv", "residuals.csv"] {
        assert!(plots.join(f).is_file());
    }

    // Flip one payload byte: the checksum no longer matches.
    let u_path = out_dir.join("u.field");
    let mut bytes = fs::read(&u_path).unwrap();
    let n = bytes.len();
    bytes[n - 3] ^= 0x40;
    fs::write(&u_path, bytes).unwrap();
    let bad = run(bin().args(["report", "--out"]).arg(&out_dir));
    assert_eq!(code(&bad), 1);
}

#[test]
fn seeds_change_nothing_but_the_start() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let cfg_a = small_config(dir_a.path(), |_| {});
    let cfg_b = small_config(dir_b.path(), |_| {});
    let (a, _) = solve(dir_a.path(), &cfg_a, &["--seed", "4"]);
    let (b, _) = solve(dir_b.path(), &cfg_b, &["--seed", "4"]);
    assert_eq!(fs::read(a.join("u.field")).unwrap(), fs::read(b.join("u.field")).unwrap());
}

#[test]
fn subharmonics_produce_a_family_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), |_| {});
    let (out_dir, out) = solve(dir.path(), &cfg, &["--subharmonics", "1,2"]);
    assert!(matches!(code(&out), 0 | 1), "{}", String::from_utf8_lossy(&out.stderr));
    let fam: Value = serde_json::from_slice(&fs::read(out_dir.join("family_report.json")).unwrap()).unwrap();
    assert_eq!(fam["members"].as_array().unwrap().len(), 2);
    assert_eq!(fam["pairs"].as_array().unwrap().len(), 1);
}

#[test]
fn missing_output_directory_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), |_| {});
    let out = run(bin().args(["solve", "--config"]).arg(&cfg));
    assert_eq!(code(&out), 2);
}
