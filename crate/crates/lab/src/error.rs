//! Harness errors mapped to process exit codes:
//! 0 success, 1 config error, 2 runtime failure, 3 acceptance failure.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),

    #[error("runtime failure: {0}")]
    Runtime(String),

    #[error("{failed} acceptance criterion(s) failed")]
    AcceptanceFailed { failed: usize },
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 1,
            LabError::Runtime(_) => 2,
            LabError::AcceptanceFailed { .. } => 3,
        }
    }
}

impl From<rbm_core::Error> for LabError {
    fn from(e: rbm_core::Error) -> Self {
        match e {
            rbm_core::Error::InvalidConfig(m) => LabError::Config(m),
            other => LabError::Runtime(other.to_string()),
        }
    }
}

impl From<crate::pool::WorkerFailure> for LabError {
    fn from(e: crate::pool::WorkerFailure) -> Self {
        LabError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Runtime(format!("io: {e}"))
    }
}

pub type Result<V> = std::result::Result<V, LabError>;
