//! Experiment drivers: each subcommand composes the core estimators through
//! the worker pool, writes CSV/JSON results, and reports its output files.

pub mod decoupling;
pub mod dos;
pub mod identities;
pub mod les;
pub mod locmoments;
pub mod volume_diff;
pub mod wegner;

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::Result;
use crate::output::RunManifest;
use crate::pool;
use std::path::PathBuf;
use std::time::Instant;

pub struct RunSummary {
    pub outputs: Vec<PathBuf>,
    pub headline: String,
}

/// Execute the configured experiment: compute, write result files, write the
/// manifest. Returns the manifest path along with the result files.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    std::fs::create_dir_all(&config.out)?;
    let start = Instant::now();
    let mut summary = match config.kind {
        ExperimentKind::Dos => dos::run(config)?,
        ExperimentKind::Locmoments => locmoments::run(config)?,
        ExperimentKind::VolumeDiff => volume_diff::run(config)?,
        ExperimentKind::Les => les::run(config)?,
        ExperimentKind::WegnerMinami => wegner::run(config)?,
        ExperimentKind::Identities => identities::run(config)?,
        ExperimentKind::Decoupling => decoupling::run(config)?,
    };
    let manifest = RunManifest::collect(
        config,
        &summary.outputs,
        pool::effective_workers(config.workers),
        start.elapsed().as_secs_f64(),
    )?;
    let manifest_path = manifest.write(&config.out)?;
    summary.outputs.push(manifest_path);
    Ok(summary)
}
