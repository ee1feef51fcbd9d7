//! End-to-end CLI checks: exit codes, output files, determinism, and config
//! precedence.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rbm-lab"))
}

fn sha(path: &Path) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    h.update(std::fs::read(path).unwrap());
    format!("{:x}", h.finalize())
}

#[test]
fn identities_exits_zero_and_prints_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["identities", "--pairs", "10", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("resolvent-integral"));
    assert!(dir.path().join("identities.csv").exists());
    assert!(dir.path().join("manifest.json").exists());
}

#[test]
fn dos_smoke_run_writes_results_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "dos",
            "--N",
            "30",
            "--L",
            "1",
            "--samples",
            "200",
            "--hist-samples",
            "150",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    for file in [
        "dos_resolvent.csv",
        "dos_histogram.csv",
        "moments.csv",
        "manifest.json",
    ] {
        assert!(dir.path().join(file).exists(), "{file} missing");
    }
    let csv = std::fs::read_to_string(dir.path().join("dos_resolvent.csv")).unwrap();
    assert!(csv.starts_with("E,value,stderr,method,smoothing,samples\n"));
}

#[test]
fn same_seed_reproduces_identical_outputs_across_worker_counts() {
    let run = |workers: &str| {
        let dir = tempfile::tempdir().unwrap();
        let out = bin()
            .args([
                "wegner-minami",
                "--N",
                "10",
                "--L",
                "1",
                "--samples",
                "1000",
                "--seed",
                "7",
                "--workers",
                workers,
                "--out",
            ])
            .arg(dir.path())
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        let digest = sha(&dir.path().join("wegner_minami.csv"));
        (dir, digest)
    };
    let (_d1, a) = run("1");
    let (_d2, b) = run("4");
    assert_eq!(a, b, "worker count changed the result bytes");
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    // L > 2N is rejected
    let out = bin()
        .args(["dos", "--N", "2", "--L", "8", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("exp.toml");
    std::fs::write(
        &cfg_path,
        r#"
kind = "wegner-minami"
out = "unused"

[ensemble]
N = 8
L = 1
seed = 99

[ensemble.density]
kind = "gaussian"
mean = 0.0
scale = 1.0

[wegner_minami]
samples = 1000
"#,
    )
    .unwrap();
    let out_dir = dir.path().join("results");
    let out = bin()
        .args(["--config"])
        .arg(&cfg_path)
        .args(["--seed", "123", "--out"])
        .arg(&out_dir)
        .arg("wegner-minami")
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    // the flag wins over the file seed
    assert_eq!(manifest["master_seed"], 123);
    assert_eq!(manifest["config"]["ensemble"]["N"], 8);
}

#[test]
fn unknown_config_key_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    std::fs::write(
        &cfg_path,
        r#"
kind = "dos"
bogus_key = 1

[ensemble]
N = 4
L = 1
seed = 1

[ensemble.density]
kind = "gaussian"
"#,
    )
    .unwrap();
    let out = bin()
        .args(["--config"])
        .arg(&cfg_path)
        .arg("dos")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus_key"));
}

#[test]
fn help_lists_every_subcommand() {
    let out = bin().arg("--help").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "identities",
        "dos",
        "locmoments",
        "volume-diff",
        "les",
        "wegner-minami",
        "decoupling",
        "all-acceptance",
    ] {
        assert!(text.contains(sub), "missing subcommand {sub}");
    }
    // per-subcommand help documents keys with defaults
    let dos_help = bin().args(["dos", "--help"]).output().unwrap();
    let text = String::from_utf8_lossy(&dos_help.stdout);
    assert!(text.contains("default 2000"));
    assert!(text.contains("--seed"));
    assert!(text.contains("--workers"));
}
