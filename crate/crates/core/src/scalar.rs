//! Generic scalar abstraction for the numerical kernels.
//!
//! Everything in the math core (band storage, eigensolvers, shifted solves,
//! quadrature) is written against [`Scalar`] so the same code instantiates at
//! `f32` and `f64`. The Monte Carlo layer works with the concrete [`crate::Real`]
//! alias because its reproducibility contracts are stated for `f64`.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar for the numerical core: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Lossless-from-f64 conversion for hard-coded coefficients
    /// (quadrature nodes, rational-approximation constants).
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant representable in scalar type")
    }

    /// Conversion to f64 for reporting and statistics.
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Complex number over the generic scalar.
pub type CScalar<T> = Complex<T>;

/// Squared modulus without the sqrt of `Complex::norm`.
pub fn norm_sqr<T: Scalar>(z: CScalar<T>) -> T {
    z.re * z.re + z.im * z.im
}
