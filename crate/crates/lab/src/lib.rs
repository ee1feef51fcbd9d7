//! Experiment harness for the random band matrix laboratory: configuration,
//! deterministic parallel execution, result persistence with run manifests,
//! and the acceptance suite.

// `!(x > 0)` rejects NaN along with nonpositive values; keep the guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod pool;

pub use config::{ExperimentConfig, ExperimentKind};
pub use error::{LabError, Result};
