//! Monte Carlo statistics helpers: means with jackknife errors, weighted
//! least squares for decay fits, Kolmogorov–Smirnov and chi-square
//! goodness-of-fit, Poisson reference quantities, and polynomial
//! extrapolation for the ε-ladder.

use crate::Real;
use statrs::function::gamma::gamma_ur;

/// Two-sided 95% normal quantile.
pub const Z95: Real = 1.959963984540054;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStderr {
    pub mean: Real,
    pub stderr: Real,
    pub n: usize,
}

impl MeanStderr {
    pub fn ci95(&self) -> (Real, Real) {
        (self.mean - Z95 * self.stderr, self.mean + Z95 * self.stderr)
    }
}

/// Sample mean with the classical standard error.
pub fn mean_stderr(xs: &[Real]) -> MeanStderr {
    let n = xs.len();
    assert!(n > 0);
    let mean = xs.iter().sum::<Real>() / n as Real;
    if n == 1 {
        return MeanStderr {
            mean,
            stderr: Real::INFINITY,
            n,
        };
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<Real>() / (n - 1) as Real;
    MeanStderr {
        mean,
        stderr: (var / n as Real).sqrt(),
        n,
    }
}

/// Delete-one jackknife standard error of the mean (equals the classical one
/// for linear statistics; kept as the uniform interface for estimator rows).
pub fn jackknife_mean_stderr(xs: &[Real]) -> MeanStderr {
    let n = xs.len();
    assert!(n > 1);
    let total: Real = xs.iter().sum();
    let mean = total / n as Real;
    let mut acc = 0.0;
    for &x in xs {
        let loo = (total - x) / (n - 1) as Real;
        acc += (loo - mean).powi(2);
    }
    let stderr = ((n - 1) as Real / n as Real * acc).sqrt();
    MeanStderr { mean, stderr, n }
}

/// Standard error of an empirical probability.
pub fn binomial_stderr(p_hat: Real, n: usize) -> Real {
    ((p_hat * (1.0 - p_hat)).max(0.0) / n as Real).sqrt()
}

/// Empirical q-quantile of pre-sorted data.
pub fn quantile_sorted(sorted: &[Real], q: Real) -> Real {
    assert!(!sorted.is_empty());
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as Real;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let w = pos - lo as Real;
        sorted[lo] * (1.0 - w) + sorted[hi] * w
    }
}

#[derive(Debug, Clone)]
pub struct WlsFit {
    pub intercept: Real,
    pub slope: Real,
    pub intercept_se: Real,
    pub slope_se: Real,
    pub r_squared: Real,
    /// fitted values at the input abscissae
    pub fitted: Vec<Real>,
}

/// Weighted least squares y ≈ a + b x with weights w (≈ 1/σ²).
pub fn weighted_least_squares(x: &[Real], y: &[Real], w: &[Real]) -> WlsFit {
    let n = x.len();
    assert!(n >= 2 && y.len() == n && w.len() == n);
    let sw: Real = w.iter().sum();
    let sx: Real = x.iter().zip(w).map(|(x, w)| x * w).sum();
    let sy: Real = y.iter().zip(w).map(|(y, w)| y * w).sum();
    let xb = sx / sw;
    let yb = sy / sw;
    let sxx: Real = x.iter().zip(w).map(|(x, w)| w * (x - xb).powi(2)).sum();
    let sxy: Real = x
        .iter()
        .zip(y.iter())
        .zip(w)
        .map(|((x, y), w)| w * (x - xb) * (y - yb))
        .sum();
    let slope = sxy / sxx;
    let intercept = yb - slope * xb;
    let slope_se = sxx.recip().sqrt();
    let intercept_se = (sw.recip() + xb * xb / sxx).sqrt();
    let fitted: Vec<Real> = x.iter().map(|&xi| intercept + slope * xi).collect();
    // weighted R²
    let ss_res: Real = y
        .iter()
        .zip(fitted.iter())
        .zip(w)
        .map(|((y, f), w)| w * (y - f).powi(2))
        .sum();
    let ss_tot: Real = y.iter().zip(w).map(|(y, w)| w * (y - yb).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else {
        1.0
    };
    WlsFit {
        intercept,
        slope,
        intercept_se,
        slope_se,
        r_squared,
        fitted,
    }
}

/// One-sample Kolmogorov–Smirnov statistic against a CDF.
pub fn ks_statistic(sorted: &[Real], cdf: impl Fn(Real) -> Real) -> Real {
    let n = sorted.len();
    assert!(n > 0);
    let mut d: Real = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d
            .max((f - i as Real / n as Real).abs())
            .max(((i + 1) as Real / n as Real - f).abs());
    }
    d
}

/// Upper-tail p-value of a chi-square statistic with `df` degrees of freedom.
pub fn chi_square_pvalue(stat: Real, df: Real) -> Real {
    if df <= 0.0 {
        return 1.0;
    }
    gamma_ur(df / 2.0, stat / 2.0)
}

/// Poisson pmf by stable recursion.
pub fn poisson_pmf(k: usize, lambda: Real) -> Real {
    if lambda <= 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let mut p = (-lambda).exp();
    for i in 1..=k {
        p *= lambda / i as Real;
    }
    p
}

/// Smallest k_max whose Poisson upper tail P{K > k_max} is below `tail`.
pub fn poisson_kmax(lambda: Real, tail: Real) -> usize {
    let mut cum = 0.0;
    let mut k = 0usize;
    loop {
        cum += poisson_pmf(k, lambda);
        if 1.0 - cum < tail || k > 10_000 {
            return k;
        }
        k += 1;
    }
}

/// Total-variation distance between an empirical count histogram and
/// Poisson(λ), truncated at k_max (all empirical mass above k_max counts).
pub fn tv_distance_to_poisson(
    histogram: &[(usize, usize)],
    realizations: usize,
    lambda: Real,
    k_max: usize,
) -> Real {
    let total = realizations as Real;
    let mut tv = 0.0;
    let mut seen_mass = 0.0;
    let mut poisson_mass = 0.0;
    for k in 0..=k_max {
        let emp = histogram
            .iter()
            .find(|&&(kk, _)| kk == k)
            .map(|&(_, c)| c as Real / total)
            .unwrap_or(0.0);
        let p = poisson_pmf(k, lambda);
        tv += (emp - p).abs();
        seen_mass += emp;
        poisson_mass += p;
    }
    // tail block
    tv += ((1.0 - seen_mass) - (1.0 - poisson_mass)).abs();
    tv / 2.0
}

/// m-th factorial moment E[k(k-1)...(k-m+1)] of counts, with standard error.
pub fn factorial_moment(counts: &[usize], m: u32) -> MeanStderr {
    let vals: Vec<Real> = counts
        .iter()
        .map(|&k| {
            let mut prod = 1.0;
            for t in 0..m {
                prod *= k as Real - t as Real;
            }
            if (k as u32) < m {
                0.0
            } else {
                prod
            }
        })
        .collect();
    mean_stderr(&vals)
}

/// Polynomial extrapolation of (x_i, y_i) to x = 0 (Lagrange form); the
/// ε-ladder limit for the resolvent DOS estimator.
pub fn extrapolate_to_zero(xs: &[Real], ys: &[Real]) -> Real {
    let n = xs.len();
    assert!(n >= 1 && ys.len() == n);
    let mut acc = 0.0;
    for i in 0..n {
        let mut w = 1.0;
        for j in 0..n {
            if i != j {
                w *= xs[j] / (xs[j] - xs[i]);
            }
        }
        acc += w * ys[i];
    }
    acc
}

/// Weights of [`extrapolate_to_zero`]; applying them per sample keeps
/// common-random-number correlations in the extrapolated error bar.
pub fn extrapolation_weights(xs: &[Real]) -> Vec<Real> {
    let n = xs.len();
    (0..n)
        .map(|i| {
            let mut w = 1.0;
            for j in 0..n {
                if i != j {
                    w *= xs[j] / (xs[j] - xs[i]);
                }
            }
            w
        })
        .collect()
}
