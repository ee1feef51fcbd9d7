//! Small special-function kit for the generic core.
//!
//! The Monte Carlo statistics layer uses `statrs` at f64; these generic
//! versions exist so the scalar-agnostic kernels (densities, sampling
//! transform) do not depend on a concrete float width.

use crate::scalar::Scalar;

/// Error function, Abramowitz & Stegun 7.1.26 rational approximation.
/// Absolute error below 1.5e-7; sufficient for CDF comparisons at Monte Carlo
/// tolerances. Exact-precision needs go through quadrature instead.
pub fn erf<T: Scalar>(x: T) -> T {
    let sign = if x < T::zero() { -T::one() } else { T::one() };
    let x = x.abs();
    let t = T::one() / (T::one() + T::of(0.3275911) * x);
    let poly = ((((T::of(1.061405429) * t - T::of(1.453152027)) * t + T::of(1.421413741)) * t
        - T::of(0.284496736))
        * t
        + T::of(0.254829592))
        * t;
    sign * (T::one() - poly * (-x * x).exp())
}

/// Standard normal CDF via [`erf`].
pub fn normal_cdf<T: Scalar>(x: T) -> T {
    let half = T::of(0.5);
    half * (T::one() + erf(x / T::SQRT_2()))
}

/// Inverse standard normal CDF, Acklam's rational approximation.
///
/// This is the fixed, documented sampling transform: relative error below
/// 1.2e-9 everywhere, and identical bit patterns on every platform because it
/// is pure rational arithmetic on f64-representable coefficients.
pub fn inverse_normal_cdf<T: Scalar>(p: T) -> T {
    assert!(
        p > T::zero() && p < T::one(),
        "quantile argument must lie strictly inside (0,1)"
    );
    let a = [
        T::of(-3.969683028665376e+01),
        T::of(2.209460984245205e+02),
        T::of(-2.759285104469687e+02),
        T::of(1.38357751867269e+02),
        T::of(-3.066479806614716e+01),
        T::of(2.506628277459239e+00),
    ];
    let b = [
        T::of(-5.447609879822406e+01),
        T::of(1.615858368580409e+02),
        T::of(-1.556989798598866e+02),
        T::of(6.680131188771972e+01),
        T::of(-1.328068155288572e+01),
    ];
    let c = [
        T::of(-7.784894002430293e-03),
        T::of(-3.223964580411365e-01),
        T::of(-2.400758277161838e+00),
        T::of(-2.549732539343734e+00),
        T::of(4.374664141464968e+00),
        T::of(2.938163982698783e+00),
    ];
    let d = [
        T::of(7.784695709041462e-03),
        T::of(3.224671290700398e-01),
        T::of(2.445134137142996e+00),
        T::of(3.754408661907416e+00),
    ];
    let p_low = T::of(0.02425);
    let p_high = T::one() - p_low;

    if p < p_low {
        let q = (-(T::one() + T::one()) * p.ln()).sqrt();
        (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + T::one())
    } else if p <= p_high {
        let q = p - T::of(0.5);
        let r = q * q;
        (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q
            / (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + T::one())
    } else {
        let q = (-(T::one() + T::one()) * (T::one() - p).ln()).sqrt();
        -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5])
            / ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantile_known_values() {
        // Phi^-1(0.975), Phi^-1(0.5), Phi(1.0)
        let q: f64 = inverse_normal_cdf(0.975);
        assert!((q - 1.959963984540054).abs() < 1e-8, "{q}");
        assert_eq!(inverse_normal_cdf::<f64>(0.5), 0.0);
        let q: f64 = inverse_normal_cdf(0.8413447460685429);
        assert!((q - 1.0).abs() < 1e-8, "{q}");
    }

    #[test]
    fn quantile_inverts_cdf_within_erf_accuracy() {
        for i in 1..60 {
            let x = -3.0 + 0.1 * i as f64;
            let p = normal_cdf(x);
            let back: f64 = inverse_normal_cdf(p);
            // limited by the 1.5e-7 erf approximation, amplified in the tails
            assert!((back - x).abs() < 5e-5, "x={x} back={back}");
        }
    }

    #[test]
    fn quantile_symmetry() {
        for &p in &[1e-6, 1e-3, 0.1, 0.3, 0.49] {
            let lo: f64 = inverse_normal_cdf(p);
            let hi: f64 = inverse_normal_cdf(1.0 - p);
            assert!((lo + hi).abs() < 1e-9, "p={p}: {lo} vs {hi}");
        }
    }

    #[test]
    fn works_in_f32() {
        let q: f32 = inverse_normal_cdf(0.975f32);
        assert!((q - 1.959964).abs() < 1e-4);
    }
}
