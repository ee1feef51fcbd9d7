//! Machine-precision checks of the resolvent-integral and Duhamel semigroup
//! identities on small matrices.
//!
//! Both checks integrate matrix-valued functions with composite 16-point
//! Gauss–Legendre panels of width at most min(1, 1/‖·‖), so the quadrature
//! error is analytically negligible next to the stated tolerances and the
//! truncation tail e^{-εT}/ε dominates the first residual.

use crate::linalg::cdense::CMatrix;
use crate::quad::{GL16_W, GL16_X};
use crate::scalar::{CScalar, Scalar};
use num_complex::Complex;

/// Composite GL16 quadrature of a matrix-valued integrand on [a, b].
fn integrate_matrix<T: Scalar>(
    f: &dyn Fn(T) -> CMatrix<T>,
    a: T,
    b: T,
    max_panel: T,
    order: usize,
) -> CMatrix<T> {
    let len = b - a;
    let panels = (len / max_panel).to_f64_lossy().ceil().max(1.0) as usize;
    let width = len / T::of_usize(panels);
    let mut acc = CMatrix::zeros(order);
    for p in 0..panels {
        let lo = a + width * T::of_usize(p);
        let center = lo + width * T::of(0.5);
        let half = width * T::of(0.5);
        for (&x, &w) in GL16_X.iter().zip(GL16_W.iter()) {
            let (xt, wt) = (T::of(x), T::of(w) * half);
            let left = f(center - half * xt).scale(Complex::new(wt, T::zero()));
            let right = f(center + half * xt).scale(Complex::new(wt, T::zero()));
            acc = acc.add(&left).add(&right);
        }
    }
    acc
}

#[derive(Debug, Clone, Copy)]
pub struct ResolventIntegralReport {
    /// max-norm of (quadrature of i∫₀^T e^{-iλ(A-z)} dλ) - (A-z)^{-1}
    pub residual: f64,
    /// analytic truncation bound e^{-εT}/ε
    pub tail_bound: f64,
}

/// Check the integral representation (A - E - iε)^{-1} = i∫₀^∞ e^{-iλ(A-E-iε)} dλ
/// on [0, T]: the residual must not exceed the tail bound plus quadrature error.
pub fn check_resolvent_integral<T: Scalar>(
    a: &CMatrix<T>,
    energy: T,
    eps: T,
    quad_cutoff: T,
) -> ResolventIntegralReport {
    assert!(eps > T::zero(), "the representation needs eps > 0");
    let n = a.order();
    let z = Complex::new(energy, eps);
    let shifted = {
        let mut m = a.clone();
        for i in 0..n {
            m[(i, i)] -= z;
        }
        m
    };
    let minus_i = Complex::new(T::zero(), -T::one());
    let integrand =
        |lam: T| -> CMatrix<T> { shifted.scale(minus_i * Complex::new(lam, T::zero())).expm() };
    let panel = T::one()
        .min((T::one() + shifted.one_norm()).recip())
        .max(T::of(1e-3));
    let quad = integrate_matrix(&integrand, T::zero(), quad_cutoff, panel, n)
        .scale(Complex::new(T::zero(), T::one()));
    let inverse = shifted.inverse().expect("A - z invertible for eps > 0");
    let residual = quad.sub(&inverse).max_norm().to_f64_lossy();
    let tail_bound = ((-eps * quad_cutoff).exp() / eps).to_f64_lossy();
    ResolventIntegralReport {
        residual,
        tail_bound,
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DuhamelReport {
    /// max-norm of e^{itA} - e^{itB} - i∫₀^t e^{i(t-s)A}(A-B)e^{isB} ds
    pub identity_residual: f64,
    /// ‖e^{itA} - e^{itB}‖₂
    pub difference_norm: f64,
    /// 2^{1-s} |t|^s ‖A-B‖₂^s
    pub bound: f64,
}

impl DuhamelReport {
    /// Slack of the interpolation bound (nonnegative when it holds).
    pub fn slack(&self) -> f64 {
        self.bound - self.difference_norm
    }
}

/// Check the Duhamel identity e^{itA} - e^{itB} = i∫₀^t e^{i(t-s)A}(A-B)e^{isB} ds
/// and, for normal A, B with nonnegative imaginary parts, the interpolation
/// bound ‖e^{itA} - e^{itB}‖ ≤ 2^{1-s}|t|^s‖A-B‖^s for s ∈ [0, 1].
pub fn check_duhamel<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>, t: T, s: T) -> DuhamelReport {
    assert!(t >= T::zero());
    assert!(s >= T::zero() && s <= T::one());
    let n = a.order();
    let i_unit: CScalar<T> = Complex::new(T::zero(), T::one());

    let exp_ta = a.scale(i_unit * Complex::new(t, T::zero())).expm();
    let exp_tb = b.scale(i_unit * Complex::new(t, T::zero())).expm();
    let diff = exp_ta.sub(&exp_tb);

    let a_minus_b = a.sub(b);
    let integrand = |u: T| -> CMatrix<T> {
        let left = a.scale(i_unit * Complex::new(t - u, T::zero())).expm();
        let right = b.scale(i_unit * Complex::new(u, T::zero())).expm();
        left.mul(&a_minus_b).mul(&right)
    };
    let identity_residual = if t == T::zero() {
        diff.max_norm().to_f64_lossy()
    } else {
        let norm_cap = T::one() + a.one_norm().max(b.one_norm());
        let panel = T::one().min(norm_cap.recip()).max(T::of(1e-3));
        let integral = integrate_matrix(&integrand, T::zero(), t, panel, n).scale(i_unit);
        diff.sub(&integral).max_norm().to_f64_lossy()
    };

    let difference_norm = diff.spectral_norm().to_f64_lossy();
    let bound = (T::of(2.0).powf(T::one() - s) * t.powf(s) * a_minus_b.spectral_norm().powf(s))
        .to_f64_lossy();

    DuhamelReport {
        identity_residual,
        difference_norm,
        bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn scalar_resolvent_integral_converges_to_i() {
        // A = (0), E = 0, ε = 1: i ∫₀^∞ e^{-λ} dλ = i = (-i)^{-1}
        let a = CMatrix::<f64>::zeros(1);
        let rep = check_resolvent_integral(&a, 0.0, 1.0, 40.0);
        assert!(rep.residual <= rep.tail_bound + 1e-10, "{rep:?}");
        assert!(rep.residual < 1e-10);
    }

    #[test]
    fn diagonal_two_level_case() {
        // A = diag(1, -1), E=0, ε=1, T=40 → residual ≤ 1e-6
        let mut a = CMatrix::<f64>::zeros(2);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(-1.0, 0.0);
        let rep = check_resolvent_integral(&a, 0.0, 1.0, 40.0);
        assert!(rep.residual <= 1e-6, "{rep:?}");
    }

    #[test]
    fn residual_decays_exponentially_in_cutoff() {
        let mut a = CMatrix::<f64>::zeros(2);
        a[(0, 0)] = c(0.5, 0.0);
        a[(1, 1)] = c(-0.25, 0.0);
        let eps = 0.5;
        let r10 = check_resolvent_integral(&a, 0.1, eps, 10.0).residual;
        let r20 = check_resolvent_integral(&a, 0.1, eps, 20.0).residual;
        let r30 = check_resolvent_integral(&a, 0.1, eps, 30.0).residual;
        // each extra 10 units of cutoff shrinks the tail by e^{-5}
        assert!(r20 < r10 * 0.1, "{r10} -> {r20}");
        assert!(r30 < r20 * 0.1 || r30 < 1e-12, "{r20} -> {r30}");
    }

    #[test]
    fn duhamel_identity_holds_for_symmetric_pair() {
        let a = CMatrix::from_real(&[
            vec![0.3, -0.2, 0.1],
            vec![-0.2, 0.5, 0.4],
            vec![0.1, 0.4, -0.6],
        ]);
        let b = CMatrix::from_real(&[
            vec![0.1, 0.0, 0.2],
            vec![0.0, -0.3, 0.1],
            vec![0.2, 0.1, 0.2],
        ]);
        let rep = check_duhamel(&a, &b, 1.0, 0.5);
        assert!(rep.identity_residual < 1e-10, "{rep:?}");
        assert!(rep.slack() >= 0.0, "{rep:?}");
    }

    #[test]
    fn duhamel_equal_arguments_and_zero_time() {
        let a = CMatrix::from_real(&[vec![0.4, 0.2], vec![0.2, -0.1]]);
        let rep = check_duhamel(&a, &a, 1.3, 0.7);
        assert!(rep.identity_residual < 1e-14);
        assert!(rep.difference_norm < 1e-14);
        let rep0 = check_duhamel(
            &a,
            &CMatrix::from_real(&[vec![0.0, 0.1], vec![0.1, 0.3]]),
            0.0,
            0.5,
        );
        assert!(rep0.difference_norm < 1e-14);
        assert_eq!(rep0.bound, 0.0);
    }
}
