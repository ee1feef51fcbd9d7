//! Result persistence: CSV tables (header row, `.` decimal, LF, UTF-8),
//! JSON metadata, and the run manifest tying outputs to their inputs.
//!
//! Result files carry no timestamps, so re-running a config with the same
//! seed reproduces them byte for byte; wall-clock data lives only in the
//! manifest.

use crate::config::ExperimentConfig;
use crate::error::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

/// Shortest round-trip decimal form of a float (Rust's default), used for
/// every numeric CSV field so output bytes are platform-stable.
pub fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut text = String::new();
    text.push_str(&header.join(","));
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| crate::error::LabError::Runtime(format!("json: {e}")))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct FileChecksum {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

pub fn checksum(path: &Path) -> Result<FileChecksum> {
    let data = fs::read(path)?;
    let mut hasher = Sha256::new();
    hasher.update(&data);
    Ok(FileChecksum {
        file: path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default(),
        sha256: format!("{:x}", hasher.finalize()),
        bytes: data.len() as u64,
    })
}

/// Run manifest: config echo, code version, seed, per-file checksums, and
/// wall-clock information. Re-running the config with the manifest's seed
/// reproduces every statistical output bit-exactly (worker count may differ).
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub code_version: String,
    pub timestamp_epoch_secs: u64,
    pub master_seed: u64,
    pub worker_count: usize,
    pub wall_clock_secs: f64,
    pub outputs: Vec<FileChecksum>,
    pub config: ExperimentConfig,
}

impl RunManifest {
    pub fn collect(
        config: &ExperimentConfig,
        outputs: &[PathBuf],
        worker_count: usize,
        wall_clock_secs: f64,
    ) -> Result<Self> {
        let mut checksums = Vec::with_capacity(outputs.len());
        for p in outputs {
            checksums.push(checksum(p)?);
        }
        Ok(RunManifest {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_epoch_secs: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            master_seed: config.ensemble.seed,
            worker_count,
            wall_clock_secs,
            outputs: checksums,
            config: config.clone(),
        })
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        write_json(&path, self)?;
        Ok(path)
    }
}
