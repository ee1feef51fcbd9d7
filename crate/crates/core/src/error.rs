//! Error type shared by the ensemble, kernel, and estimator layers.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Configuration violates a documented precondition.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A banded factorization met a pivot below the near-singular threshold.
    /// The caller should retry with a positive imaginary shift.
    #[error("near-singular solve: pivot {pivot:.3e} below threshold {threshold:.3e}; retry with eps > 0")]
    NearSingular { pivot: f64, threshold: f64 },

    /// A block that must be inverted is singular; add a positive imaginary shift.
    #[error("singular block in {context}; add a positive imaginary shift")]
    SingularBlock { context: &'static str },

    /// Decay fitting needs at least four distances with signal above noise.
    #[error("insufficient decay range: {usable} usable distances (need >= {needed})")]
    InsufficientDecayRange { usable: usize, needed: usize },

    /// Poisson goodness-of-fit needs a positive reference intensity.
    #[error("invalid intensity {0}; must be > 0")]
    InvalidIntensity(f64),

    /// A tabulated density or estimate does not satisfy a type invariant.
    #[error("invalid density: {0}")]
    InvalidDensity(String),
}

pub type Result<V> = std::result::Result<V, Error>;
