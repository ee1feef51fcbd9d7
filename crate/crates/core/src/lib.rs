//! Numerical laboratory for fixed-bandwidth random band matrices.
//!
//! The crate samples symmetric band matrices of order 2N+1 and half-bandwidth
//! L with iid entries scaled by 1/√(2L+1), provides exact banded kernels
//! (eigensolvers, shifted complex solves, Schur-complement inversion), and
//! builds the Monte Carlo estimators on top: density-of-states estimates and
//! semicircle comparisons, fractional-moment localization profiles,
//! volume-difference couplings, and local eigenvalue statistics with Poisson
//! goodness-of-fit.
//!
//! The math core is generic over the scalar type via [`scalar::Scalar`]
//! (`f32` or `f64`); the Monte Carlo layer is pinned to [`Real`].

// `!(x > 0)` rejects NaN along with nonpositive values; keep the guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod band;
pub mod density;
pub mod dos;
pub mod error;
pub mod les;
pub mod linalg;
pub mod localization;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod special;
pub mod stats;

pub use band::{BandMatrix, EnsembleConfig, EnsembleParams};
pub use density::{DensityConfig, DensitySpec};
pub use error::{Error, Result};
pub use linalg::SpectralDecomposition;
pub use rng::RngStream;
pub use scalar::Scalar;

/// Concrete scalar used by the Monte Carlo estimator layer.
pub type Real = f64;
/// Complex shift values z = E + iε at the concrete scalar.
pub type Cplx = num_complex::Complex<Real>;
/// Band matrix at the concrete scalar.
pub type RealBandMatrix = BandMatrix<Real>;
/// Ensemble configuration at the concrete scalar.
pub type RealEnsemble = EnsembleConfig<Real>;

/// Complex shift z = E + iε; ε = 0 only for almost-surely regular real
/// energies (near-singular solves report an error and the caller retries).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexShift {
    pub energy: Real,
    pub eps: Real,
}

impl ComplexShift {
    pub fn new(energy: Real, eps: Real) -> Self {
        assert!(eps >= 0.0, "imaginary part must be >= 0");
        ComplexShift { energy, eps }
    }

    pub fn real(energy: Real) -> Self {
        Self::new(energy, 0.0)
    }

    pub fn value(self) -> Cplx {
        Cplx::new(self.energy, self.eps)
    }

    pub fn modulus(self) -> Real {
        self.value().norm()
    }
}
