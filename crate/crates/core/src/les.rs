//! Local eigenvalue statistics: rescaling by (2N+1) around a reference
//! energy, half-open window counting, empirical eigenvalue-count bounds,
//! block superposition, and Poisson goodness-of-fit.

use crate::band::EnsembleConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, reduce, tridiag};
use crate::stats::{self, MeanStderr};
use crate::Real;
use std::collections::BTreeMap;

/// Half-open window [lo, hi) in rescaled units; half-openness makes
/// disjoint-union count additivity exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: Real,
    pub hi: Real,
}

impl Window {
    pub fn new(lo: Real, hi: Real) -> Self {
        assert!(hi >= lo);
        Window { lo, hi }
    }

    pub fn centered(width: Real) -> Self {
        Self::new(-width / 2.0, width / 2.0)
    }

    pub fn length(self) -> Real {
        self.hi - self.lo
    }

    pub fn contains(self, x: Real) -> bool {
        x >= self.lo && x < self.hi
    }
}

/// Rescaled eigenvalues Ẽ = (2N+1)(λ - E₀) falling in a window, for one
/// matrix sample.
#[derive(Debug, Clone)]
pub struct PointProcessRealization {
    pub center: Real,
    pub window: Window,
    /// ascending rescaled points inside the window
    pub points: Vec<Real>,
    pub half_size: usize,
    pub half_bandwidth: usize,
    pub sample_index: u64,
}

impl PointProcessRealization {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    /// Original eigenvalue for a stored point (exact inverse of the rescaling).
    pub fn unrescale(&self, point: Real) -> Real {
        self.center + point / (2 * self.half_size + 1) as Real
    }
}

/// Rescale a full eigenvalue list around E₀ and keep the window points.
pub fn rescale_eigenvalues(
    values: &[Real],
    center: Real,
    half_size: usize,
    half_bandwidth: usize,
    window: Window,
    sample_index: u64,
) -> PointProcessRealization {
    let scale = (2 * half_size + 1) as Real;
    let mut points: Vec<Real> = values
        .iter()
        .map(|&v| scale * (v - center))
        .filter(|&x| window.contains(x))
        .collect();
    points.sort_by(Real::total_cmp);
    PointProcessRealization {
        center,
        window,
        points,
        half_size,
        half_bandwidth,
        sample_index,
    }
}

/// Per-sample realization through the windowed eigensolver (Sturm bisection);
/// equivalent to rescaling the full spectrum but O(n) per count.
pub fn window_realization(
    config: &EnsembleConfig<Real>,
    center: Real,
    window: Window,
    sample_index: u64,
) -> PointProcessRealization {
    let scale = config.order() as Real;
    let h = config.sample(sample_index);
    let evs =
        linalg::eigenvalues_in_window(&h, center + window.lo / scale, center + window.hi / scale);
    rescale_eigenvalues(
        &evs,
        center,
        config.half_size(),
        config.half_bandwidth(),
        window,
        sample_index,
    )
}

/// Aggregated window-count statistics over realizations on a common window.
#[derive(Debug, Clone)]
pub struct CountStatistics {
    pub window: Window,
    pub histogram: BTreeMap<usize, usize>,
    pub realization_count: usize,
    pub mean: Real,
    pub mean_stderr: Real,
    /// factorial moments m = 1, 2, 3 with standard errors
    pub factorial_moments: [MeanStderr; 3],
}

pub fn count_statistics(realizations: &[PointProcessRealization]) -> Result<CountStatistics> {
    if realizations.is_empty() {
        return Err(Error::InvalidConfig("no realizations".into()));
    }
    let window = realizations[0].window;
    if realizations.iter().any(|r| r.window != window) {
        return Err(Error::InvalidConfig(
            "realizations disagree on the window".into(),
        ));
    }
    let counts: Vec<usize> = realizations.iter().map(|r| r.count()).collect();
    let mut histogram = BTreeMap::new();
    for &k in &counts {
        *histogram.entry(k).or_insert(0usize) += 1;
    }
    let m1 = stats::factorial_moment(&counts, 1);
    let m2 = stats::factorial_moment(&counts, 2);
    let m3 = stats::factorial_moment(&counts, 3);
    Ok(CountStatistics {
        window,
        histogram,
        realization_count: realizations.len(),
        mean: m1.mean,
        mean_stderr: m1.stderr,
        factorial_moments: [m1, m2, m3],
    })
}

impl CountStatistics {
    pub fn probability_at_least(&self, k_min: usize) -> MeanStderr {
        let hits = self
            .histogram
            .iter()
            .filter(|&(&k, _)| k >= k_min)
            .map(|(_, &c)| c)
            .sum::<usize>();
        let p = hits as Real / self.realization_count as Real;
        MeanStderr {
            mean: p,
            stderr: stats::binomial_stderr(p, self.realization_count),
            n: self.realization_count,
        }
    }
}

/// Poisson goodness-of-fit report against a supplied reference intensity.
#[derive(Debug, Clone)]
pub struct GofReport {
    /// reference λ = intensity · |A|
    pub lambda: Real,
    /// total-variation distance of the count histogram to Poisson(λ)
    pub tv_distance: Real,
    /// truncation point (Poisson tail below 1e-6)
    pub k_max: usize,
    /// KS distance of pooled within-window gaps to Exponential(intensity);
    /// None when fewer than 10 gaps were observed
    pub gap_ks: Option<Real>,
    pub gap_count: usize,
    /// chi-square p-value of the count histogram (bins pooled to expected ≥ 5)
    pub chi_square_p: Real,
}

/// Count TV distance, gap KS, and chi-square p-value against
/// Poisson(intensity·|A|). The intensity comes from the DOS estimate at E₀,
/// never from the counts themselves.
pub fn poisson_gof(
    stats_: &CountStatistics,
    realizations: &[PointProcessRealization],
    intensity: Real,
) -> Result<GofReport> {
    if !(intensity > 0.0) {
        return Err(Error::InvalidIntensity(intensity));
    }
    let lambda = intensity * stats_.window.length();
    let k_max = stats::poisson_kmax(lambda, 1e-6);
    let hist: Vec<(usize, usize)> = stats_.histogram.iter().map(|(&k, &c)| (k, c)).collect();
    let tv = stats::tv_distance_to_poisson(&hist, stats_.realization_count, lambda, k_max);

    // within-window gaps pooled over realizations
    let mut gaps: Vec<Real> = Vec::new();
    for r in realizations {
        for w in r.points.windows(2) {
            gaps.push(w[1] - w[0]);
        }
    }
    gaps.sort_by(Real::total_cmp);
    let gap_count = gaps.len();
    let gap_ks = if gap_count >= 10 {
        Some(stats::ks_statistic(&gaps, |g| 1.0 - (-intensity * g).exp()))
    } else {
        None
    };

    // chi-square with consecutive bins pooled to expected count ≥ 5
    let r = stats_.realization_count as Real;
    let mut chi2 = 0.0;
    let mut dof_bins = 0usize;
    let mut pool_obs = 0.0;
    let mut pool_exp = 0.0;
    for k in 0..=k_max {
        pool_obs += stats_.histogram.get(&k).copied().unwrap_or(0) as Real;
        pool_exp += r * stats::poisson_pmf(k, lambda);
        if pool_exp >= 5.0 {
            chi2 += (pool_obs - pool_exp).powi(2) / pool_exp;
            dof_bins += 1;
            pool_obs = 0.0;
            pool_exp = 0.0;
        }
    }
    // tail block: everything above the last pooled bin
    let tail_obs = stats_
        .histogram
        .iter()
        .filter(|&(&k, _)| k > k_max)
        .map(|(_, &c)| c as Real)
        .sum::<Real>()
        + pool_obs;
    let tail_exp = r
        * (1.0
            - (0..=k_max)
                .map(|k| stats::poisson_pmf(k, lambda))
                .sum::<Real>())
        + pool_exp;
    if tail_exp > 0.0 {
        chi2 += (tail_obs - tail_exp).powi(2) / tail_exp;
        dof_bins += 1;
    }
    let chi_square_p = if dof_bins >= 2 {
        stats::chi_square_pvalue(chi2, (dof_bins - 1) as Real)
    } else {
        1.0
    };

    Ok(GofReport {
        lambda,
        tv_distance: tv,
        k_max,
        gap_ks,
        gap_count,
        chi_square_p,
    })
}

// ---------------------------------------------------------------------------
// Eigenvalue-count bounds (Wegner/Minami style)
// ---------------------------------------------------------------------------

/// Empirical count statistics for intervals centered at one energy, against
/// the averaging bound π‖ρ‖∞·√L·(2N+1)·|I| and its powers.
#[derive(Debug, Clone)]
pub struct WegnerMinamiRow {
    pub width: Real,
    pub prob_at_least_one: MeanStderr,
    pub prob_at_least_two: MeanStderr,
    pub mean_count: MeanStderr,
    pub second_factorial: MeanStderr,
    pub third_factorial: MeanStderr,
    /// π‖ρ‖∞ L^{1/2} (2N+1)|I|
    pub wegner_bound: Real,
}

/// The L^{1/2} factor of the count bounds; at L = 0 the averaging argument
/// produces √(2L+1) = 1 rather than a vanishing constant.
fn bandwidth_factor(l: usize) -> Real {
    if l == 0 {
        1.0
    } else {
        (l as Real).sqrt()
    }
}

pub fn wegner_bound(config: &EnsembleConfig<Real>, width: Real) -> Real {
    std::f64::consts::PI
        * config.density().sup_norm()
        * bandwidth_factor(config.half_bandwidth())
        * config.order() as Real
        * width
}

/// Per-sample eigenvalue counts in the intervals [center - w/2, center + w/2)
/// for each width, from one tridiagonal reduction and Sturm counts.
pub fn interval_counts(
    config: &EnsembleConfig<Real>,
    center: Real,
    widths: &[Real],
    sample_index: u64,
) -> Vec<usize> {
    let h = config.sample(sample_index);
    let (d, e, _) = reduce::tridiagonalize(&h, false);
    widths
        .iter()
        .map(|&w| {
            tridiag::sturm_count(&d, &e, center + w / 2.0)
                - tridiag::sturm_count(&d, &e, center - w / 2.0)
        })
        .collect()
}

pub fn reduce_interval_counts(
    config: &EnsembleConfig<Real>,
    widths: &[Real],
    rows: &[Vec<usize>],
) -> Vec<WegnerMinamiRow> {
    widths
        .iter()
        .enumerate()
        .map(|(wi, &w)| {
            let counts: Vec<usize> = rows.iter().map(|r| r[wi]).collect();
            let n = counts.len();
            let p1 = counts.iter().filter(|&&k| k >= 1).count() as Real / n as Real;
            let p2 = counts.iter().filter(|&&k| k >= 2).count() as Real / n as Real;
            WegnerMinamiRow {
                width: w,
                prob_at_least_one: MeanStderr {
                    mean: p1,
                    stderr: stats::binomial_stderr(p1, n),
                    n,
                },
                prob_at_least_two: MeanStderr {
                    mean: p2,
                    stderr: stats::binomial_stderr(p2, n),
                    n,
                },
                mean_count: stats::factorial_moment(&counts, 1),
                second_factorial: stats::factorial_moment(&counts, 2),
                third_factorial: stats::factorial_moment(&counts, 3),
                wegner_bound: wegner_bound(config, w),
            }
        })
        .collect()
}

/// Empirical Wegner/Minami statistics for interval widths at a common center.
pub fn wegner_minami_empirical(
    config: &EnsembleConfig<Real>,
    center: Real,
    widths: &[Real],
    sample_count: usize,
) -> Result<Vec<WegnerMinamiRow>> {
    if sample_count < 1000 {
        return Err(Error::InvalidConfig(
            "count-bound statistics need >= 1000 samples".into(),
        ));
    }
    let rows: Vec<Vec<usize>> = (0..sample_count as u64)
        .map(|idx| interval_counts(config, center, widths, idx))
        .collect();
    Ok(reduce_interval_counts(config, widths, &rows))
}

// ---------------------------------------------------------------------------
// Block superposition
// ---------------------------------------------------------------------------

/// Superposed point process from independent diagonal blocks of length
/// ~N^α (remainder indices dropped), each rescaled by the FULL factor (2N+1).
/// The blocks are disjoint index sets of the same sample, hence independent.
pub fn block_superposed_process(
    config: &EnsembleConfig<Real>,
    center: Real,
    window: Window,
    alpha: Real,
    sample_index: u64,
) -> Result<PointProcessRealization> {
    if !(0.0..1.0).contains(&alpha) || alpha == 0.0 {
        return Err(Error::InvalidConfig("alpha must lie in (0, 1)".into()));
    }
    let n = config.order();
    let l = config.half_bandwidth();
    let block_len = ((config.half_size() as Real).powf(alpha).round() as usize).min(n);
    if block_len < 2 * l + 1 {
        return Err(Error::InvalidConfig(format!(
            "block length {block_len} below 2L+1 = {}",
            2 * l + 1
        )));
    }
    let blocks = n / block_len;
    let h = config.sample(sample_index);
    let scale = n as Real;
    let mut points = Vec::new();
    for p in 0..blocks {
        let sub = h.sub_block(p * block_len, block_len);
        let (d, e, _) = reduce::tridiagonalize(&sub, false);
        let evs = tridiag::eigenvalues_in_window(
            &d,
            &e,
            center + window.lo / scale,
            center + window.hi / scale,
        );
        points.extend(evs.into_iter().map(|v| scale * (v - center)));
    }
    points.sort_by(Real::total_cmp);
    Ok(PointProcessRealization {
        center,
        window,
        points,
        half_size: config.half_size(),
        half_bandwidth: config.half_bandwidth(),
        sample_index,
    })
}

/// One row of the intensity pipeline: mean window count and Poisson TV at one
/// matrix size.
#[derive(Debug, Clone)]
pub struct PipelineRow {
    pub half_size: usize,
    pub mean_count: MeanStderr,
    pub tv_distance: Real,
    pub gap_ks: Option<Real>,
    pub realizations: usize,
}

/// Mean counts and TV distances across a ladder of sizes at a fixed window,
/// against Poisson(intensity·|A|) with the intensity supplied externally
/// (from the DOS module at E₀).
pub fn intensity_pipeline(
    configs: &[EnsembleConfig<Real>],
    center: Real,
    window: Window,
    realizations: usize,
    intensity: Real,
) -> Result<Vec<PipelineRow>> {
    let mut out = Vec::with_capacity(configs.len());
    for cfg in configs {
        let rs: Vec<PointProcessRealization> = (0..realizations as u64)
            .map(|idx| window_realization(cfg, center, window, idx))
            .collect();
        let cs = count_statistics(&rs)?;
        let gof = poisson_gof(&cs, &rs, intensity)?;
        out.push(PipelineRow {
            half_size: cfg.half_size(),
            mean_count: MeanStderr {
                mean: cs.mean,
                stderr: cs.mean_stderr,
                n: cs.realization_count,
            },
            tv_distance: gof.tv_distance,
            gap_ks: gof.gap_ks,
            realizations: cs.realization_count,
        });
    }
    Ok(out)
}
