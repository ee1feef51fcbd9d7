//! One-dimensional quadrature: adaptive Gauss–Kronrod 15(7) and fixed
//! 16-point Gauss–Legendre panels.
//!
//! Integrable power singularities `|v - c|^{-s}` (s < 1) are handled by the
//! exact substitution `v = c ± t^{1/(1-s)}`, which removes the singularity
//! rather than refining into it.

use crate::scalar::Scalar;

/// Kronrod abscissae (positive half, descending), QUADPACK `dqk15`.
const XGK: [f64; 8] = [
    0.9914553711208126,
    0.9491079123427585,
    0.8648644233597691,
    0.7415311855993944,
    0.5860872354676911,
    0.4058451513773972,
    0.2077849550078985,
    0.0,
];
/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.02293532201052922,
    0.06309209262997855,
    0.1047900103222502,
    0.1406532597155259,
    0.1690047266392679,
    0.1903505780647854,
    0.2044329400752989,
    0.2094821410847278,
];
/// Embedded 7-point Gauss weights (nodes are XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.1294849661688697,
    0.2797053914892767,
    0.3818300505051189,
    0.4179591836734694,
];

/// 16-point Gauss–Legendre abscissae (positive half, ascending).
pub const GL16_X: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.755404408355003,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
/// Weights matching `GL16_X`.
pub const GL16_W: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub abs_error: T,
}

/// One Gauss–Kronrod 15(7) panel on [a, b]: returns (Kronrod value, error estimate).
pub fn gk15<T: Scalar>(f: &dyn Fn(T) -> T, a: T, b: T) -> (T, T) {
    let half = (b - a) * T::of(0.5);
    let center = (a + b) * T::of(0.5);
    let mut kronrod = T::zero();
    let mut gauss = T::zero();
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let (xt, wt) = (T::of(x), T::of(w));
        let fv = if i == 7 {
            f(center)
        } else {
            f(center - half * xt) + f(center + half * xt)
        };
        kronrod += wt * fv;
        if i % 2 == 1 {
            // odd positions are the embedded Gauss-7 nodes (incl. center at i=7)
            gauss += T::of(WG[i / 2]) * fv;
        }
    }
    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    (value, err)
}

/// Adaptive bisection on [a, b] down to absolute tolerance `tol`.
pub fn integrate<T: Scalar>(f: &dyn Fn(T) -> T, a: T, b: T, tol: T) -> QuadResult<T> {
    fn go<T: Scalar>(f: &dyn Fn(T) -> T, a: T, b: T, tol: T, depth: u32) -> QuadResult<T> {
        let (v, e) = gk15(f, a, b);
        if e <= tol || depth >= 48 {
            return QuadResult {
                value: v,
                abs_error: e,
            };
        }
        let mid = (a + b) * T::of(0.5);
        let half_tol = tol * T::of(0.5);
        let left = go(f, a, mid, half_tol, depth + 1);
        let right = go(f, mid, b, half_tol, depth + 1);
        QuadResult {
            value: left.value + right.value,
            abs_error: left.abs_error + right.abs_error,
        }
    }
    go(f, a, b, tol, 0)
}

/// Adaptive integration with interior breakpoints (singular or kink points).
/// Breakpoints outside (a, b) are ignored.
pub fn integrate_split<T: Scalar>(
    f: &dyn Fn(T) -> T,
    a: T,
    b: T,
    breakpoints: &[T],
    tol: T,
) -> QuadResult<T> {
    let mut pts: Vec<T> = breakpoints
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();
    pts.push(a);
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let per = tol / T::of_usize(pts.len().max(2) - 1);
    let mut total = QuadResult {
        value: T::zero(),
        abs_error: T::zero(),
    };
    for w in pts.windows(2) {
        let r = integrate(f, w[0], w[1], per);
        total.value += r.value;
        total.abs_error += r.abs_error;
    }
    total
}

/// ∫ over one side of a power singularity:
/// `side = +1`: ∫_{c}^{c+h} g(v) (v-c)^{-s} dv;  `side = -1`: ∫_{c-h}^{c} g(v) (c-v)^{-s} dv.
/// Requires 0 <= s < 1. The substitution v = c ± t^{1/(1-s)} gives
/// (1/(1-s)) ∫_0^{h^{1-s}} g(c ± t^{1/(1-s)}) dt with a smooth integrand.
pub fn integrate_power_singularity<T: Scalar>(
    g: &dyn Fn(T) -> T,
    center: T,
    s: T,
    h: T,
    side: i8,
    tol: T,
) -> QuadResult<T> {
    assert!(
        s >= T::zero() && s < T::one(),
        "power exponent must be in [0,1)"
    );
    assert!(h > T::zero());
    let one_minus = T::one() - s;
    let upper = h.powf(one_minus);
    let sgn = if side >= 0 { T::one() } else { -T::one() };
    let f = move |t: T| -> T {
        if t <= T::zero() {
            // limit value: g(center) (integrand is continuous at t=0)
            g(center) / one_minus
        } else {
            g(center + sgn * t.powf(T::one() / one_minus)) / one_minus
        }
    };
    integrate(&f, T::zero(), upper, tol)
}

/// ∫_a^b g(v) |v - c|^{-s} dv with c possibly inside [a, b].
pub fn integrate_with_power_weight<T: Scalar>(
    g: &dyn Fn(T) -> T,
    a: T,
    b: T,
    c: T,
    s: T,
    tol: T,
) -> QuadResult<T> {
    let weighted = move |v: T| g(v) * (v - c).abs().powf(-s);
    if c <= a || c >= b {
        // singularity outside: plain adaptive, but keep panels off the endpoint
        return integrate_split(&weighted, a, b, &[], tol);
    }
    let third = tol / T::of(3.0);
    let left = integrate_power_singularity(g, c, s, c - a, -1, third);
    let right = integrate_power_singularity(g, c, s, b - c, 1, third);
    QuadResult {
        value: left.value + right.value,
        abs_error: left.abs_error + right.abs_error,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let r = integrate(&|x: f64| x * x, 0.0, 1.0, 1e-12);
        assert!((r.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_mass_is_one() {
        let r = integrate(
            &|x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            -12.0,
            12.0,
            1e-12,
        );
        assert!((r.value - 1.0).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = integrate_power_singularity(&|_x: f64| 1.0, 0.0, 0.5, 1.0, 1, 1e-12);
        assert!((r.value - 2.0).abs() < 1e-10, "{}", r.value);
        // two-sided: ∫_{-1}^{1} |x|^{-1/2} dx = 4
        let r = integrate_with_power_weight(&|_x: f64| 1.0, -1.0, 1.0, 0.0, 0.5, 1e-12);
        assert!((r.value - 4.0).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn oscillatory_integrand() {
        // ∫_0^{2π} cos(25 x) dx = 0
        let r = integrate(
            &|x: f64| (25.0 * x).cos(),
            0.0,
            2.0 * std::f64::consts::PI,
            1e-11,
        );
        assert!(r.value.abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn gl16_weights_sum_to_two() {
        let s: f64 = GL16_W.iter().sum::<f64>() * 2.0;
        assert!((s - 2.0).abs() < 1e-13);
    }

    #[test]
    fn f32_instantiation() {
        let r = integrate(&|x: f32| x.exp(), 0.0f32, 1.0, 1e-5);
        assert!((r.value - (std::f32::consts::E - 1.0)).abs() < 1e-4);
    }
}
