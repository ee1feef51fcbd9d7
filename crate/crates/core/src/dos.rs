//! Density-of-states estimation: the local integrated DOS by counting, the
//! DOS function by histogram/KDE and by the resolvent representation
//! (1/π)·E{Im G_jj(E+iε)}, trace moments with an interior variant, the
//! semicircle reference, and finite-size convergence diagnostics.

use crate::band::EnsembleConfig;
use crate::error::{Error, Result};
use crate::linalg::{bandlu, SpectralDecomposition};
use crate::quad;
use crate::scalar::Scalar;
use crate::stats::{self, MeanStderr};
use crate::{Cplx, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DosMethod {
    Histogram,
    Kde,
    Resolvent,
}

impl DosMethod {
    pub fn label(self) -> &'static str {
        match self {
            DosMethod::Histogram => "histogram",
            DosMethod::Kde => "kde",
            DosMethod::Resolvent => "resolvent",
        }
    }
}

/// DOS values on an energy grid with per-point Monte Carlo error bars.
#[derive(Debug, Clone)]
pub struct DosEstimate {
    pub grid: Vec<Real>,
    pub values: Vec<Real>,
    pub stderr: Vec<Real>,
    pub method: DosMethod,
    /// bin width, kernel bandwidth, or ε (0 for the ε→0 extrapolation)
    pub smoothing: Real,
    pub sample_count: usize,
    /// a near-singular solve was retried at doubled ε somewhere
    pub retry_flagged: bool,
}

impl DosEstimate {
    /// Trapezoid integral over the grid.
    pub fn integral(&self) -> Real {
        let mut acc = 0.0;
        for w in self.grid.windows(2).zip(self.values.windows(2)) {
            let (g, v) = w;
            acc += (g[1] - g[0]) * (v[0] + v[1]) * 0.5;
        }
        acc
    }

    pub fn value_at(&self, e: Real) -> Option<Real> {
        self.grid
            .iter()
            .position(|&g| (g - e).abs() < 1e-12)
            .map(|i| self.values[i])
    }
}

// ---------------------------------------------------------------------------
// Counting estimators
// ---------------------------------------------------------------------------

/// Local integrated DOS at energy `e`: average over samples of
/// #{λ_j ≤ e}/(2N+1). Nondecreasing in `e`, valued in [0, 1].
pub fn empirical_lids(samples: &[SpectralDecomposition<Real>], e: Real) -> MeanStderr {
    assert!(!samples.is_empty());
    let rows: Vec<Real> = samples
        .iter()
        .map(|s| {
            let count = s.values.iter().filter(|&&v| v <= e).count();
            count as Real / s.order() as Real
        })
        .collect();
    stats::mean_stderr(&rows)
}

/// Histogram binning rule.
#[derive(Debug, Clone, Copy)]
pub enum BinRule {
    /// Freedman–Diaconis: width 2·IQR·n^{-1/3} (default).
    FreedmanDiaconis,
    /// Explicit bin width.
    Width(Real),
}

/// Normalized eigenvalue histogram as a density on [lo, hi), with per-bin
/// binomial standard errors. Needs at least 100 samples.
pub fn dos_histogram(
    samples: &[SpectralDecomposition<Real>],
    lo: Real,
    hi: Real,
    rule: BinRule,
) -> Result<DosEstimate> {
    if samples.len() < 100 {
        return Err(Error::InvalidConfig(format!(
            "histogram needs >= 100 samples, got {}",
            samples.len()
        )));
    }
    if !(hi > lo) {
        return Err(Error::InvalidConfig("degenerate energy grid".into()));
    }
    let mut all: Vec<Real> = samples
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .collect();
    all.sort_by(Real::total_cmp);
    let total = all.len();
    let width = match rule {
        BinRule::Width(w) => {
            if !(w > 0.0) {
                return Err(Error::InvalidConfig("bin width must be > 0".into()));
            }
            w
        }
        BinRule::FreedmanDiaconis => {
            let iqr = stats::quantile_sorted(&all, 0.75) - stats::quantile_sorted(&all, 0.25);
            let w = 2.0 * iqr * (total as Real).powf(-1.0 / 3.0);
            if w <= 0.0 {
                return Err(Error::InvalidConfig(
                    "degenerate spectrum for FD rule".into(),
                ));
            }
            w
        }
    };
    let bins = (((hi - lo) / width).ceil() as usize).max(1);
    let mut counts = vec![0usize; bins];
    for &v in &all {
        if v >= lo && v < hi {
            let b = (((v - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    let grid: Vec<Real> = (0..bins).map(|b| lo + (b as Real + 0.5) * width).collect();
    let mut values = Vec::with_capacity(bins);
    let mut stderr = Vec::with_capacity(bins);
    for &c in &counts {
        let p = c as Real / total as Real;
        values.push(p / width);
        stderr.push(stats::binomial_stderr(p, total) / width);
    }
    Ok(DosEstimate {
        grid,
        values,
        stderr,
        method: DosMethod::Histogram,
        smoothing: width,
        sample_count: samples.len(),
        retry_flagged: false,
    })
}

/// Silverman bandwidth 0.9·min(σ, IQR/1.34)·n^{-1/5} on pooled eigenvalues.
pub fn silverman_bandwidth(sorted_pooled: &[Real]) -> Real {
    let n = sorted_pooled.len() as Real;
    let mean = sorted_pooled.iter().sum::<Real>() / n;
    let sd = (sorted_pooled
        .iter()
        .map(|x| (x - mean).powi(2))
        .sum::<Real>()
        / (n - 1.0))
        .sqrt();
    let iqr =
        stats::quantile_sorted(sorted_pooled, 0.75) - stats::quantile_sorted(sorted_pooled, 0.25);
    0.9 * sd.min(iqr / 1.34) * n.powf(-0.2)
}

/// Gaussian-kernel density estimate of the DOS on an explicit grid.
pub fn dos_kde(
    samples: &[SpectralDecomposition<Real>],
    grid: &[Real],
    bandwidth: Option<Real>,
) -> Result<DosEstimate> {
    if samples.len() < 100 {
        return Err(Error::InvalidConfig(format!(
            "kde needs >= 100 samples, got {}",
            samples.len()
        )));
    }
    let mut all: Vec<Real> = samples
        .iter()
        .flat_map(|s| s.values.iter().copied())
        .collect();
    all.sort_by(Real::total_cmp);
    let h = bandwidth.unwrap_or_else(|| silverman_bandwidth(&all));
    if !(h > 0.0) {
        return Err(Error::InvalidConfig("kernel bandwidth must be > 0".into()));
    }
    let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * h * all.len() as Real);
    let mut values = Vec::with_capacity(grid.len());
    let mut stderr = Vec::with_capacity(grid.len());
    for &e in grid {
        let mut acc = 0.0;
        let mut acc2 = 0.0;
        for &x in &all {
            let k = (-0.5 * ((e - x) / h).powi(2)).exp();
            acc += k;
            acc2 += k * k;
        }
        let v = acc * norm;
        // per-point kernel-sum standard error
        let n = all.len() as Real;
        let mean_k = acc / n;
        let var_k = (acc2 / n - mean_k * mean_k).max(0.0);
        values.push(v);
        stderr.push((var_k / n).sqrt() / ((2.0 * std::f64::consts::PI).sqrt() * h));
    }
    Ok(DosEstimate {
        grid: grid.to_vec(),
        values,
        stderr,
        method: DosMethod::Kde,
        smoothing: h,
        sample_count: samples.len(),
        retry_flagged: false,
    })
}

// ---------------------------------------------------------------------------
// Resolvent estimators
// ---------------------------------------------------------------------------

/// Per-sample row of (1/π)·Im G values on the grid: the normalized trace when
/// `center_only` is false, the center diagonal entry otherwise. A
/// near-singular solve is retried at 2ε (flag in `.1`).
pub fn resolvent_sample_row(
    config: &EnsembleConfig<Real>,
    grid: &[Real],
    eps: Real,
    center_only: bool,
    sample_index: u64,
) -> (Vec<Real>, bool) {
    assert!(eps > 0.0, "resolvent estimator needs eps > 0");
    let h = config.sample(sample_index);
    let n = h.order();
    let mut retried = false;
    let row = grid
        .iter()
        .map(|&e| {
            let mut cur_eps = eps;
            loop {
                let z = Cplx::new(e, cur_eps);
                match bandlu::resolvent_diagonal(&h, z) {
                    Ok(diag) => {
                        let v = if center_only {
                            diag[n / 2].im
                        } else {
                            diag.iter().map(|g| g.im).sum::<Real>() / n as Real
                        };
                        return v / std::f64::consts::PI;
                    }
                    Err(_) => {
                        retried = true;
                        cur_eps *= 2.0;
                    }
                }
            }
        })
        .collect();
    (row, retried)
}

/// Reduce per-sample rows (ascending sample order) into a [`DosEstimate`].
pub fn reduce_resolvent_rows(
    grid: &[Real],
    rows: &[(Vec<Real>, bool)],
    smoothing: Real,
) -> DosEstimate {
    let m = grid.len();
    let mut values = Vec::with_capacity(m);
    let mut stderr = Vec::with_capacity(m);
    for j in 0..m {
        let col: Vec<Real> = rows.iter().map(|(r, _)| r[j]).collect();
        let ms = stats::mean_stderr(&col);
        values.push(ms.mean);
        stderr.push(ms.stderr);
    }
    DosEstimate {
        grid: grid.to_vec(),
        values,
        stderr,
        method: DosMethod::Resolvent,
        smoothing,
        sample_count: rows.len(),
        retry_flagged: rows.iter().any(|(_, f)| *f),
    }
}

/// Resolvent DOS estimator at fixed ε: (1/π)(1/(2N+1)) Σ_j E{Im G_jj(E+iε)},
/// or the infinite-volume center-entry variant (1/π)E{Im G_00}.
pub fn dos_resolvent(
    config: &EnsembleConfig<Real>,
    grid: &[Real],
    eps: Real,
    sample_count: usize,
    center_only: bool,
) -> DosEstimate {
    let rows: Vec<(Vec<Real>, bool)> = (0..sample_count as u64)
        .map(|idx| resolvent_sample_row(config, grid, eps, center_only, idx))
        .collect();
    reduce_resolvent_rows(grid, &rows, eps)
}

/// Per-sample ε-ladder row, extrapolated to ε → 0 per grid point with shared
/// random numbers across the ladder.
pub fn resolvent_ladder_sample_row(
    config: &EnsembleConfig<Real>,
    grid: &[Real],
    ladder: &[Real],
    weights: &[Real],
    center_only: bool,
    sample_index: u64,
) -> (Vec<Real>, bool) {
    let h = config.sample(sample_index);
    let n = h.order();
    let mut retried = false;
    let mut row = vec![0.0; grid.len()];
    for (t, &eps) in ladder.iter().enumerate() {
        assert!(eps > 0.0);
        for (j, &e) in grid.iter().enumerate() {
            let mut cur_eps = eps;
            let v = loop {
                let z = Cplx::new(e, cur_eps);
                match bandlu::resolvent_diagonal(&h, z) {
                    Ok(diag) => {
                        break if center_only {
                            diag[n / 2].im
                        } else {
                            diag.iter().map(|g| g.im).sum::<Real>() / n as Real
                        };
                    }
                    Err(_) => {
                        retried = true;
                        cur_eps *= 2.0;
                    }
                }
            };
            row[j] += weights[t] * v / std::f64::consts::PI;
        }
    }
    (row, retried)
}

/// ε→0 Richardson-style estimator across a fixed ladder (default 0.2/0.1/0.05):
/// the polynomial-in-ε extrapolation is applied per sample so the error bars
/// keep the common-random-number correlation.
pub fn dos_resolvent_extrapolated(
    config: &EnsembleConfig<Real>,
    grid: &[Real],
    ladder: &[Real],
    sample_count: usize,
    center_only: bool,
) -> DosEstimate {
    let weights = stats::extrapolation_weights(ladder);
    let rows: Vec<(Vec<Real>, bool)> = (0..sample_count as u64)
        .map(|idx| resolvent_ladder_sample_row(config, grid, ladder, &weights, center_only, idx))
        .collect();
    reduce_resolvent_rows(grid, &rows, 0.0)
}

/// The default ε-ladder.
pub const EPS_LADDER: [Real; 3] = [0.2, 0.1, 0.05];

// ---------------------------------------------------------------------------
// Moments and the semicircle reference
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct MomentEstimate {
    pub p: u32,
    pub value: Real,
    pub stderr: Real,
    pub half_size: usize,
    pub half_bandwidth: usize,
}

/// Trace moments (1/(2N+1))·E{Σ_j λ_j^p} for p = 0..=p_max from spectra,
/// with jackknife standard errors. The p = 0 moment is exactly 1.
pub fn dos_moments(
    samples: &[SpectralDecomposition<Real>],
    p_max: u32,
    half_size: usize,
    half_bandwidth: usize,
) -> Result<Vec<MomentEstimate>> {
    if samples.len() < 100 {
        return Err(Error::InvalidConfig(format!(
            "moments need >= 100 samples, got {}",
            samples.len()
        )));
    }
    let mut out = Vec::with_capacity(p_max as usize + 1);
    for p in 0..=p_max {
        if p == 0 {
            out.push(MomentEstimate {
                p,
                value: 1.0,
                stderr: 0.0,
                half_size,
                half_bandwidth,
            });
            continue;
        }
        let rows: Vec<Real> = samples
            .iter()
            .map(|s| s.values.iter().map(|&v| v.powi(p as i32)).sum::<Real>() / s.order() as Real)
            .collect();
        let ms = stats::jackknife_mean_stderr(&rows);
        out.push(MomentEstimate {
            p,
            value: ms.mean,
            stderr: ms.stderr,
            half_size,
            half_bandwidth,
        });
    }
    Ok(out)
}

/// Per-sample interior moment row: (H^p)_jj averaged over |j| ≤ N - L, for
/// p = 1..=p_max, via exact banded powers (no eigensolve).
pub fn interior_moment_row(
    config: &EnsembleConfig<Real>,
    p_max: u32,
    sample_index: u64,
) -> Vec<Real> {
    let h = config.sample(sample_index);
    let n = h.order();
    let l = config.half_bandwidth();
    let lo = l;
    let hi = n - l; // exclusive; |j| ≤ N - L in 0-based row terms
    let count = (hi - lo) as Real;
    let mut out = Vec::with_capacity(p_max as usize);
    let mut acc = h.clone();
    for p in 1..=p_max {
        let diag = acc.diagonal(0);
        out.push(diag[lo..hi].iter().sum::<Real>() / count);
        if p < p_max {
            acc = h.mul_band(&acc);
        }
    }
    out
}

/// Interior-trace moment estimates: boundary rows within L of the edge are
/// excluded, isolating the infinite-volume value.
pub fn dos_moments_interior(
    config: &EnsembleConfig<Real>,
    p_max: u32,
    sample_count: usize,
) -> Vec<MomentEstimate> {
    let rows: Vec<Vec<Real>> = (0..sample_count as u64)
        .map(|idx| interior_moment_row(config, p_max, idx))
        .collect();
    reduce_interior_moments(config, p_max, &rows)
}

pub fn reduce_interior_moments(
    config: &EnsembleConfig<Real>,
    p_max: u32,
    rows: &[Vec<Real>],
) -> Vec<MomentEstimate> {
    let mut out = vec![MomentEstimate {
        p: 0,
        value: 1.0,
        stderr: 0.0,
        half_size: config.half_size(),
        half_bandwidth: config.half_bandwidth(),
    }];
    for p in 1..=p_max {
        let col: Vec<Real> = rows.iter().map(|r| r[(p - 1) as usize]).collect();
        let ms = stats::jackknife_mean_stderr(&col);
        out.push(MomentEstimate {
            p,
            value: ms.mean,
            stderr: ms.stderr,
            half_size: config.half_size(),
            half_bandwidth: config.half_bandwidth(),
        });
    }
    out
}

/// Semicircle density (1/2π)√(4-E²)₊, supported on [-2, 2].
pub fn semicircle_density<T: Scalar>(e: T) -> T {
    let four = T::of(4.0);
    let x = four - e * e;
    if x <= T::zero() {
        T::zero()
    } else {
        x.sqrt() / (T::of(2.0) * T::PI())
    }
}

/// p-th semicircle moment by adaptive quadrature (odd moments vanish;
/// the even ones are the Catalan numbers).
pub fn semicircle_moment(p: u32) -> Real {
    quad::integrate(
        &|e: Real| e.powi(p as i32) * semicircle_density(e),
        -2.0,
        2.0,
        1e-11,
    )
    .value
}

// ---------------------------------------------------------------------------
// Convergence and smoothness diagnostics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct GapReport {
    /// sup over the shared grid of |n^N - n^{N'}|
    pub sup_gap: Real,
    /// sup of the combined per-point standard errors
    pub combined_stderr: Real,
}

/// Sup-norm gap between two DOS estimates on the same grid.
pub fn dos_convergence_gap(a: &DosEstimate, b: &DosEstimate) -> Result<GapReport> {
    if a.grid.len() != b.grid.len()
        || a.grid
            .iter()
            .zip(b.grid.iter())
            .any(|(x, y)| (x - y).abs() > 1e-12)
    {
        return Err(Error::InvalidConfig(
            "estimates live on different grids".into(),
        ));
    }
    let mut sup_gap: Real = 0.0;
    let mut combined: Real = 0.0;
    for i in 0..a.grid.len() {
        sup_gap = sup_gap.max((a.values[i] - b.values[i]).abs());
        combined = combined.max(a.stderr[i] + b.stderr[i]);
    }
    Ok(GapReport {
        sup_gap,
        combined_stderr: combined,
    })
}

#[derive(Debug, Clone)]
pub struct SmoothnessProbe {
    pub energies: Vec<Real>,
    pub derivatives: Vec<Real>,
    pub error_bars: Vec<Real>,
    pub order: u32,
    /// error bars exceed the signal scale (set for m > 2 noisy probes)
    pub noise_dominated: bool,
}

/// Central finite differences of order m (1 or 2 are meaningful; higher
/// orders are flagged when noise dominates) on a uniform grid.
pub fn smoothness_probe(est: &DosEstimate, m: u32) -> Result<SmoothnessProbe> {
    let n = est.grid.len();
    if n < 2 * m as usize + 1 {
        return Err(Error::InvalidConfig(
            "grid too short for the probe order".into(),
        ));
    }
    let h = est.grid[1] - est.grid[0];
    for w in est.grid.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs() {
            return Err(Error::InvalidConfig("probe needs a uniform grid".into()));
        }
    }
    let mut energies = Vec::new();
    let mut derivatives = Vec::new();
    let mut error_bars = Vec::new();
    match m {
        1 => {
            for i in 1..n - 1 {
                energies.push(est.grid[i]);
                derivatives.push((est.values[i + 1] - est.values[i - 1]) / (2.0 * h));
                error_bars.push(
                    (est.stderr[i + 1].powi(2) + est.stderr[i - 1].powi(2)).sqrt() / (2.0 * h),
                );
            }
        }
        2 => {
            for i in 1..n - 1 {
                energies.push(est.grid[i]);
                derivatives
                    .push((est.values[i + 1] - 2.0 * est.values[i] + est.values[i - 1]) / (h * h));
                let var = est.stderr[i + 1].powi(2)
                    + 4.0 * est.stderr[i].powi(2)
                    + est.stderr[i - 1].powi(2);
                error_bars.push(var.sqrt() / (h * h));
            }
        }
        _ => {
            // iterated first differences; noise grows like h^{-m}
            let mut vals = est.values.clone();
            let mut errs: Vec<Real> = est.stderr.iter().map(|s| s * s).collect();
            for _ in 0..m {
                let mut nv = Vec::with_capacity(vals.len().saturating_sub(2));
                let mut ne = Vec::with_capacity(vals.len().saturating_sub(2));
                for i in 1..vals.len() - 1 {
                    nv.push((vals[i + 1] - vals[i - 1]) / (2.0 * h));
                    ne.push((errs[i + 1] + errs[i - 1]) / (4.0 * h * h));
                }
                vals = nv;
                errs = ne;
            }
            let off = m as usize;
            energies = est.grid[off..n - off].to_vec();
            derivatives = vals;
            error_bars = errs.into_iter().map(Real::sqrt).collect();
        }
    }
    let signal = derivatives.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    let noise = error_bars.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    Ok(SmoothnessProbe {
        energies,
        derivatives,
        error_bars,
        order: m,
        noise_dominated: m > 2 && noise > signal,
    })
}
