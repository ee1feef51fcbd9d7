//! Fractional moments of Green's-function entries and their decay.
//!
//! Monte Carlo estimators for E|G_jk(z)|^s with s ∈ (0,1), exponential-decay
//! fits over index distance, spectral-averaging suprema, coupled
//! volume-difference decay at shared randomness, reduced-matrix resolvent
//! decay, and quadrature checks of the lower/upper decoupling inequalities.
//!
//! Volume differences are evaluated through the second-resolvent-identity
//! coupling representation: with C the off-block coupling entries between
//! the large and embedded small matrix,
//!     ⟨e_j, (R_N - R_M)e_j⟩ = -Σ_{(u,v)} (R_N e_j)_u H_{uv} (R_M e_j)_v ,
//! a product of solves with no catastrophic cancellation, exactly zero for
//! N = M, and faithful down to magnitudes ~e^{-γ(M-|j|)} far below the f64
//! subtraction floor.

use crate::band::{BandMatrix, EnsembleConfig};
use crate::density::DensitySpec;
use crate::error::{Error, Result};
use crate::linalg::bandlu::{self, default_pivot_threshold};
use crate::quad;
use crate::stats::{self, MeanStderr, WlsFit, Z95};
use crate::{ComplexShift, Cplx, Real};

/// ε used when a real-energy solve keeps hitting near-singular pivots.
pub const ESCALATION_EPS: Real = 1e-8;

/// One row of a fractional-moment decay profile.
#[derive(Debug, Clone, Copy)]
pub struct ProfileRow {
    pub distance: usize,
    pub estimate: Real,
    pub stderr: Real,
    pub samples: usize,
}

/// Estimates of E|G_{j,j+d}(z)|^s indexed by distance d, with shared samples
/// across distances (common random numbers).
#[derive(Debug, Clone)]
pub struct FracMomentProfile {
    pub s: Real,
    pub shift: ComplexShift,
    pub rows: Vec<ProfileRow>,
    pub half_size: usize,
    pub half_bandwidth: usize,
    /// samples that needed the ε-escalation fallback
    pub escalated: usize,
}

/// Exponential-decay fit of a profile: log E|G|^s ≈ log C - α d.
#[derive(Debug, Clone)]
pub struct DecayFit {
    pub log_c: Real,
    pub alpha: Real,
    /// 95% confidence interval for α
    pub alpha_ci: (Real, Real),
    pub r_squared: Real,
    pub distances_used: Vec<usize>,
    fit: WlsFit,
}

impl DecayFit {
    pub fn predicted(&self, distance: usize) -> Real {
        (self.log_c - self.alpha * distance as Real).exp()
    }

    pub fn fitted_log(&self) -> &[Real] {
        &self.fit.fitted
    }
}

fn solve_column_with_escalation(
    h: &BandMatrix<Real>,
    shift: ComplexShift,
    k: usize,
) -> (Vec<Cplx>, bool) {
    match bandlu::green_column(h, shift.value(), k) {
        Ok(col) => (col, false),
        Err(_) => {
            let z = Cplx::new(shift.energy, shift.eps.max(ESCALATION_EPS));
            let col = bandlu::green_column(h, z, k)
                .expect("escalated solve with positive imaginary shift");
            (col, true)
        }
    }
}

fn abs_to_row(config: &EnsembleConfig<Real>, j: i64) -> Result<usize> {
    let n = config.half_size() as i64;
    if j < -n || j > n {
        return Err(Error::InvalidConfig(format!(
            "index {j} outside [-{n}, {n}]"
        )));
    }
    Ok((j + n) as usize)
}

/// Monte Carlo estimate of E|⟨e_j, (H-z)^{-1} e_k⟩|^s, finite for every z
/// including real energies (spectral averaging). Returns the estimate, its
/// jackknife standard error, and the number of ε-escalated samples.
pub fn fractional_moment(
    config: &EnsembleConfig<Real>,
    shift: ComplexShift,
    s: Real,
    j: i64,
    k: i64,
    sample_count: usize,
) -> Result<(MeanStderr, usize)> {
    if !(0.0..1.0).contains(&s) || s == 0.0 {
        return Err(Error::InvalidConfig(format!("s = {s} must lie in (0,1)")));
    }
    if sample_count < 100 {
        return Err(Error::InvalidConfig("need >= 100 samples".into()));
    }
    let (j0, k0) = (abs_to_row(config, j)?, abs_to_row(config, k)?);
    let mut vals = Vec::with_capacity(sample_count);
    let mut escalated = 0usize;
    for idx in 0..sample_count as u64 {
        let h = config.sample(idx);
        let (col, esc) = solve_column_with_escalation(&h, shift, k0);
        if esc {
            escalated += 1;
        }
        vals.push(col[j0].norm().powf(s));
    }
    Ok((stats::jackknife_mean_stderr(&vals), escalated))
}

/// Per-sample profile row: |G_{c, c+d}|^s for d = 0..=max_distance from one
/// column solve (common random numbers across distances).
pub fn profile_sample_row(
    config: &EnsembleConfig<Real>,
    shift: ComplexShift,
    s: Real,
    center: i64,
    max_distance: usize,
    sample_index: u64,
) -> (Vec<Real>, bool) {
    let c0 = abs_to_row(config, center).expect("validated center");
    let h = config.sample(sample_index);
    let (col, esc) = solve_column_with_escalation(&h, shift, c0);
    let row = (0..=max_distance)
        .map(|d| col[c0 + d].norm().powf(s))
        .collect();
    (row, esc)
}

/// Reduce per-sample profile rows (ascending sample order) into a profile.
pub fn reduce_profile_rows(
    config: &EnsembleConfig<Real>,
    shift: ComplexShift,
    s: Real,
    rows: &[(Vec<Real>, bool)],
) -> FracMomentProfile {
    let max_distance = rows[0].0.len() - 1;
    let mut out = Vec::with_capacity(max_distance + 1);
    for d in 0..=max_distance {
        let col: Vec<Real> = rows.iter().map(|(r, _)| r[d]).collect();
        let ms = stats::jackknife_mean_stderr(&col);
        out.push(ProfileRow {
            distance: d,
            estimate: ms.mean,
            stderr: ms.stderr,
            samples: rows.len(),
        });
    }
    FracMomentProfile {
        s,
        shift,
        rows: out,
        half_size: config.half_size(),
        half_bandwidth: config.half_bandwidth(),
        escalated: rows.iter().filter(|(_, e)| *e).count(),
    }
}

/// Decay profile of E|G_{c,c+d}(z)|^s over d = 0..=max_distance.
pub fn decay_profile(
    config: &EnsembleConfig<Real>,
    shift: ComplexShift,
    s: Real,
    center: i64,
    max_distance: usize,
    sample_count: usize,
) -> Result<FracMomentProfile> {
    if !(0.0..1.0).contains(&s) || s == 0.0 {
        return Err(Error::InvalidConfig(format!("s = {s} must lie in (0,1)")));
    }
    if max_distance > 2 * config.half_size() {
        return Err(Error::InvalidConfig("max_distance exceeds 2N".into()));
    }
    let c0 = abs_to_row(config, center)?;
    if c0 + max_distance >= config.order() {
        return Err(Error::InvalidConfig(
            "center + max_distance leaves the matrix".into(),
        ));
    }
    let rows: Vec<(Vec<Real>, bool)> = (0..sample_count as u64)
        .map(|idx| profile_sample_row(config, shift, s, center, max_distance, idx))
        .collect();
    Ok(reduce_profile_rows(config, shift, s, &rows))
}

/// Weighted least squares of log(estimate) against distance, over rows with
/// d >= min_distance whose estimate clears 3 standard errors (log of noise is
/// meaningless). Needs at least 4 usable rows.
pub fn decay_fit(profile: &FracMomentProfile, min_distance: usize) -> Result<DecayFit> {
    let usable: Vec<&ProfileRow> = profile
        .rows
        .iter()
        .filter(|r| r.distance >= min_distance && r.estimate > 3.0 * r.stderr && r.estimate > 0.0)
        .collect();
    if usable.len() < 4 {
        return Err(Error::InsufficientDecayRange {
            usable: usable.len(),
            needed: 4,
        });
    }
    let x: Vec<Real> = usable.iter().map(|r| r.distance as Real).collect();
    let y: Vec<Real> = usable.iter().map(|r| r.estimate.ln()).collect();
    // delta method: σ_log = σ/μ
    let w: Vec<Real> = usable
        .iter()
        .map(|r| (r.estimate / r.stderr).powi(2))
        .collect();
    let fit = stats::weighted_least_squares(&x, &y, &w);
    let alpha = -fit.slope;
    let ci = (alpha - Z95 * fit.slope_se, alpha + Z95 * fit.slope_se);
    Ok(DecayFit {
        log_c: fit.intercept,
        alpha,
        alpha_ci: ci,
        r_squared: fit.r_squared,
        distances_used: usable.iter().map(|r| r.distance).collect(),
        fit,
    })
}

// ---------------------------------------------------------------------------
// Spectral-averaging suprema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct SpectralAveragingRow {
    pub shift: ComplexShift,
    pub diag_s_moment: MeanStderr,
    pub offdiag_s_moment: MeanStderr,
    pub abs_im_diag: MeanStderr,
}

#[derive(Debug, Clone)]
pub struct SpectralAveragingReport {
    pub s: Real,
    pub rows: Vec<SpectralAveragingRow>,
    pub sup_diag: Real,
    pub sup_offdiag: Real,
    pub sup_abs_im: Real,
}

/// Empirical suprema over a z-grid of the diagonal/off-diagonal s-moments and
/// of E|Im G_jj|; the a-priori bounds say none of these blow up as ε → 0.
pub fn spectral_averaging_sup(
    config: &EnsembleConfig<Real>,
    s: Real,
    z_grid: &[ComplexShift],
    sample_count: usize,
) -> Result<SpectralAveragingReport> {
    if !(0.0..1.0).contains(&s) || s == 0.0 {
        return Err(Error::InvalidConfig(format!("s = {s} must lie in (0,1)")));
    }
    let c0 = config.half_size();
    let off = if config.half_bandwidth() >= 1 {
        c0 + 1
    } else {
        c0
    };
    let mut rows = Vec::with_capacity(z_grid.len());
    for &shift in z_grid {
        let mut diag = Vec::with_capacity(sample_count);
        let mut offd = Vec::with_capacity(sample_count);
        let mut imd = Vec::with_capacity(sample_count);
        for idx in 0..sample_count as u64 {
            let h = config.sample(idx);
            let (col, _) = solve_column_with_escalation(&h, shift, c0);
            diag.push(col[c0].norm().powf(s));
            offd.push(if off == c0 {
                0.0
            } else {
                col[off].norm().powf(s)
            });
            imd.push(col[c0].im.abs());
        }
        rows.push(SpectralAveragingRow {
            shift,
            diag_s_moment: stats::mean_stderr(&diag),
            offdiag_s_moment: stats::mean_stderr(&offd),
            abs_im_diag: stats::mean_stderr(&imd),
        });
    }
    let sup = |f: fn(&SpectralAveragingRow) -> Real| rows.iter().map(f).fold(0.0f64, Real::max);
    Ok(SpectralAveragingReport {
        s,
        sup_diag: sup(|r| r.diag_s_moment.mean),
        sup_offdiag: sup(|r| r.offdiag_s_moment.mean),
        sup_abs_im: sup(|r| r.abs_im_diag.mean),
        rows,
    })
}

// ---------------------------------------------------------------------------
// Volume-difference decay (coupled builds)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct VolumeDifference {
    /// E|G^N_jj - G^M_jj|
    pub abs_diff: MeanStderr,
    /// E|⟨Ψ_j, (R̃_N - R̃_M)Ψ_j⟩|^s
    pub reduced_form_s_moment: MeanStderr,
    pub half_size_large: usize,
    pub half_size_small: usize,
}

/// The coupling (cap) entries: pairs (u, v) with |u| > M, |v| <= M,
/// |u - v| <= L, over both mirrored boundary regions.
fn cap_pairs(n_half: i64, m_half: i64, l: i64) -> Vec<(i64, i64)> {
    let mut caps = Vec::new();
    for u in (m_half + 1)..=(m_half + l).min(n_half) {
        for v in (u - l).max(-m_half)..=m_half {
            caps.push((u, v));
        }
    }
    for u in (-(m_half + l)).max(-n_half)..=(-m_half - 1) {
        for v in (-m_half)..=(u + l).min(m_half) {
            caps.push((u, v));
        }
    }
    caps
}

/// Per-sample coupled volume difference: (|G^N_jj - G^M_jj|, |⟨Ψ,(ΔR̃)Ψ⟩|^s).
pub fn volume_diff_sample(
    config_n: &EnsembleConfig<Real>,
    config_m: &EnsembleConfig<Real>,
    j: i64,
    shift: ComplexShift,
    s: Real,
    sample_index: u64,
) -> (Real, Real) {
    let (nn, mm) = (config_n.half_size() as i64, config_m.half_size() as i64);
    let l = config_n.half_bandwidth() as i64;
    let z = shift.value();
    let h_n = config_n.sample(sample_index);
    let h_m = config_m.sample(sample_index);
    let j_n = (j + nn) as usize;
    let j_m = (j + mm) as usize;
    let caps = cap_pairs(nn, mm, l);

    // part 1: coupling representation of G^N_jj - G^M_jj
    let col_n = bandlu::green_column(&h_n, z, j_n).expect("Im z > 0 keeps the solve regular");
    let col_m = bandlu::green_column(&h_m, z, j_m).expect("Im z > 0 keeps the solve regular");
    let mut diff = Cplx::new(0.0, 0.0);
    for &(u, v) in &caps {
        let huv = h_n.get((u + nn) as usize, (v + nn) as usize);
        if huv != 0.0 {
            diff -= col_n[(u + nn) as usize] * huv * col_m[(v + mm) as usize];
        }
    }

    // part 2: the same representation for the reduced quadratic form
    let r_n = h_n.reduced(j_n);
    let r_m = h_m.reduced(j_m);
    let lu_n = bandlu::factor_shifted(&r_n, z, default_pivot_threshold(&r_n))
        .expect("reduced solve regular for Im z > 0");
    let lu_m = bandlu::factor_shifted(&r_m, z, default_pivot_threshold(&r_m))
        .expect("reduced solve regular for Im z > 0");
    let mut psi_n = vec![Cplx::new(0.0, 0.0); h_n.order()];
    let mut psi_m = vec![Cplx::new(0.0, 0.0); h_m.order()];
    for i in (j - l)..=(j + l) {
        if i == j {
            continue;
        }
        let value = h_n.get(j_n, (i + nn) as usize);
        psi_n[(i + nn) as usize] = Cplx::new(value, 0.0);
        psi_m[(i + mm) as usize] = Cplx::new(value, 0.0);
    }
    lu_n.solve(&mut psi_n);
    lu_m.solve(&mut psi_m);
    let mut form = Cplx::new(0.0, 0.0);
    for &(u, v) in &caps {
        let huv = h_n.get((u + nn) as usize, (v + nn) as usize);
        if huv != 0.0 {
            form -= psi_n[(u + nn) as usize] * huv * psi_m[(v + mm) as usize];
        }
    }

    (diff.norm(), form.norm().powf(s))
}

/// Coupled volume-difference estimates at shared randomness; exactly zero for
/// N = M. Requires s ∈ (0, 1/9) and |j| ≤ M - L.
pub fn volume_difference_decay(
    config_n: &EnsembleConfig<Real>,
    m_half: usize,
    j: i64,
    shift: ComplexShift,
    s: Real,
    sample_count: usize,
) -> Result<VolumeDifference> {
    if shift.eps <= 0.0 {
        return Err(Error::InvalidConfig(
            "volume differences need Im z > 0".into(),
        ));
    }
    if !(0.0..1.0 / 9.0).contains(&s) || s == 0.0 {
        return Err(Error::InvalidConfig(format!(
            "s = {s} must lie in (0, 1/9) for the reduced-form bound"
        )));
    }
    let n_half = config_n.half_size();
    let l = config_n.half_bandwidth();
    if m_half > n_half {
        return Err(Error::InvalidConfig("need M <= N".into()));
    }
    if j.unsigned_abs() as usize + l > m_half {
        return Err(Error::InvalidConfig(format!(
            "|j| = {} must be <= M - L = {}",
            j.unsigned_abs(),
            m_half as i64 - l as i64
        )));
    }
    let config_m = config_n.with_half_size(m_half)?;
    let mut abs_rows = Vec::with_capacity(sample_count);
    let mut form_rows = Vec::with_capacity(sample_count);
    for idx in 0..sample_count as u64 {
        let (a, f) = volume_diff_sample(config_n, &config_m, j, shift, s, idx);
        abs_rows.push(a);
        form_rows.push(f);
    }
    Ok(VolumeDifference {
        abs_diff: stats::mean_stderr(&abs_rows),
        reduced_form_s_moment: stats::mean_stderr(&form_rows),
        half_size_large: n_half,
        half_size_small: m_half,
    })
}

/// E|⟨e_i, (H̃(j) - z)^{-1} e_k⟩|^s for the reduced matrix (row/column j
/// zeroed). Requires L ≥ 1, |i-j| ≤ L with i ≠ j, ||k| - N| ≤ L, s ∈ (0, 1/3).
pub fn reduced_resolvent_decay(
    config: &EnsembleConfig<Real>,
    j: i64,
    i: i64,
    k: i64,
    shift: ComplexShift,
    s: Real,
    sample_count: usize,
) -> Result<(MeanStderr, usize)> {
    let l = config.half_bandwidth() as i64;
    let n = config.half_size() as i64;
    if l == 0 {
        return Err(Error::InvalidConfig(
            "L = 0 leaves no off-center indices within the band".into(),
        ));
    }
    if i == j || (i - j).abs() > l {
        return Err(Error::InvalidConfig(format!(
            "need i ≠ j and |i-j| ≤ L; got i = {i}, j = {j}"
        )));
    }
    if (k.abs() - n).abs() > l {
        return Err(Error::InvalidConfig(format!(
            "need ||k| - N| ≤ L; got k = {k}, N = {n}"
        )));
    }
    if !(0.0..1.0 / 3.0).contains(&s) || s == 0.0 {
        return Err(Error::InvalidConfig(format!(
            "s = {s} must lie in (0, 1/3)"
        )));
    }
    let (i0, j0, k0) = (
        abs_to_row(config, i)?,
        abs_to_row(config, j)?,
        abs_to_row(config, k)?,
    );
    let mut vals = Vec::with_capacity(sample_count);
    let mut escalated = 0usize;
    for idx in 0..sample_count as u64 {
        let r = config.sample(idx).reduced(j0);
        let (col, esc) = solve_column_with_escalation(&r, shift, k0);
        if esc {
            escalated += 1;
        }
        vals.push(col[i0].norm().powf(s));
    }
    Ok((stats::mean_stderr(&vals), escalated))
}

// ---------------------------------------------------------------------------
// Decoupling inequality checks (pure quadrature)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct LowerDecouplingRow {
    pub eta: Real,
    /// inf over the β-grid of LHS/(|η|^s · RHS)
    pub inf_ratio: Real,
    /// the implied C(|η|)/|η| = inf_ratio^{1/s}
    pub c_over_eta: Real,
    pub argmin_beta: Real,
}

#[derive(Debug, Clone)]
pub struct LowerDecouplingReport {
    pub s: Real,
    pub rows: Vec<LowerDecouplingRow>,
}

/// Lower decoupling: ∫|v-η|^s|v-β|^{-s}ρ dv ≥ C(|η|)^s ∫|v-β|^{-s}ρ dv with
/// C(R)/R → 1. Reports the worst ratio over the β-grid per η; β = η grid
/// collisions are excluded.
pub fn decoupling_lower_check(
    density: &DensitySpec<Real>,
    s: Real,
    eta_grid: &[Real],
    beta_grid: &[Real],
) -> Result<LowerDecouplingReport> {
    if !(0.0..1.0).contains(&s) || s == 0.0 {
        return Err(Error::InvalidConfig(format!("s = {s} must lie in (0,1)")));
    }
    let (lo, hi) = density.support();
    let tol = 1e-10;
    let mut rows = Vec::with_capacity(eta_grid.len());
    for &eta in eta_grid {
        let mut inf_ratio = Real::INFINITY;
        let mut argmin = Real::NAN;
        for &beta in beta_grid {
            if (beta - eta).abs() < 1e-12 {
                continue; // degenerate: both sides coincide
            }
            let num = quad::integrate_with_power_weight(
                &|v: Real| (v - eta).abs().powf(s) * density.eval(v),
                lo,
                hi,
                beta,
                s,
                tol,
            )
            .value;
            let den =
                quad::integrate_with_power_weight(&|v: Real| density.eval(v), lo, hi, beta, s, tol)
                    .value;
            let ratio = num / (eta.abs().powf(s) * den);
            if ratio < inf_ratio {
                inf_ratio = ratio;
                argmin = beta;
            }
        }
        rows.push(LowerDecouplingRow {
            eta,
            inf_ratio,
            c_over_eta: inf_ratio.powf(1.0 / s),
            argmin_beta: argmin,
        });
    }
    Ok(LowerDecouplingReport { s, rows })
}

/// Rational test case for the upper decoupling: p of degree ≤ 1, q of degree
/// ≤ 2 without real roots.
#[derive(Debug, Clone, Copy)]
pub struct PolyCase {
    /// p(u) = p0 + p1·u
    pub p: (Real, Real),
    /// q(u) = q0 + q1·u + q2·u²
    pub q: (Real, Real, Real),
}

impl PolyCase {
    fn q_has_real_root(&self) -> bool {
        let (q0, q1, q2) = self.q;
        if q2 == 0.0 {
            q1 != 0.0 || q0 == 0.0
        } else {
            q1 * q1 - 4.0 * q0 * q2 >= 0.0
        }
    }

    fn p_at(&self, u: Real) -> Real {
        self.p.0 + self.p.1 * u
    }

    fn q_at(&self, u: Real) -> Real {
        self.q.0 + self.q.1 * u + self.q.2 * u * u
    }
}

#[derive(Debug, Clone, Copy)]
pub struct UpperDecouplingRow {
    pub case_index: usize,
    pub lhs: Real,
    pub rhs: Real,
    pub ratio: Real,
}

#[derive(Debug, Clone)]
pub struct UpperDecouplingReport {
    pub s: Real,
    pub gamma: Real,
    pub rows: Vec<UpperDecouplingRow>,
    pub max_ratio: Real,
    pub min_ratio: Real,
}

/// Upper decoupling: ∫|u|^s (|p|^s/|q|^s) ρ du ≤ C ∫(|p|^s/|q|^s) ρ du over a
/// grid of rational cases; reports the empirical C (max ratio). Requires
/// s < 1/2 (γ = 4s with p of degree 1 and q of degree 2) and q without real
/// roots.
pub fn decoupling_upper_check(
    density: &DensitySpec<Real>,
    s: Real,
    cases: &[PolyCase],
) -> Result<UpperDecouplingReport> {
    if !(0.0..0.5).contains(&s) || s == 0.0 {
        return Err(Error::InvalidConfig(format!(
            "s = {s} must lie in (0, 1/2) for γ = 4s with a degree-2 denominator"
        )));
    }
    let (lo, hi) = density.support();
    let tol = 1e-10;
    let mut rows = Vec::with_capacity(cases.len());
    for (idx, case) in cases.iter().enumerate() {
        if case.q_has_real_root() {
            return Err(Error::InvalidConfig(format!(
                "case {idx}: q has a real root (noncompact singularity)"
            )));
        }
        let weight = |u: Real| (case.p_at(u).abs().powf(s)) / (case.q_at(u).abs().powf(s));
        // breakpoints: root of p (kink) and 0 (|u|^s kink)
        let mut breaks = vec![0.0];
        if case.p.1 != 0.0 {
            breaks.push(-case.p.0 / case.p.1);
        }
        let lhs = quad::integrate_split(
            &|u: Real| u.abs().powf(s) * weight(u) * density.eval(u),
            lo,
            hi,
            &breaks,
            tol,
        )
        .value;
        let rhs =
            quad::integrate_split(&|u: Real| weight(u) * density.eval(u), lo, hi, &breaks, tol)
                .value;
        rows.push(UpperDecouplingRow {
            case_index: idx,
            lhs,
            rhs,
            ratio: lhs / rhs,
        });
    }
    let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0f64, Real::max);
    let min_ratio = rows.iter().map(|r| r.ratio).fold(Real::INFINITY, Real::min);
    Ok(UpperDecouplingReport {
        s,
        gamma: 4.0 * s,
        rows,
        max_ratio,
        min_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::DensitySpec;

    fn gaussian_config(n: usize, l: usize, seed: u64) -> EnsembleConfig<Real> {
        EnsembleConfig::new(n, l, DensitySpec::standard_gaussian(), seed).unwrap()
    }

    #[test]
    fn diagonal_offdiagonal_moment_is_zero() {
        let cfg = gaussian_config(6, 0, 3);
        let (ms, _) = fractional_moment(&cfg, ComplexShift::new(0.0, 1.0), 0.5, 0, 2, 200).unwrap();
        assert_eq!(ms.mean, 0.0);
    }

    #[test]
    fn diagonal_moment_matches_quadrature_oracle() {
        // L=0, z=i, s=1/2: E|v - i|^{-1/2} = ∫ (v²+1)^{-1/4} ρ(v) dv = 0.8821792724
        let rho = DensitySpec::<Real>::standard_gaussian();
        let oracle = quad::integrate(
            &|v: Real| (v * v + 1.0).powf(-0.25) * rho.eval(v),
            -13.5,
            13.5,
            1e-12,
        )
        .value;
        assert!((oracle - 0.8821792724).abs() < 1e-9, "oracle {oracle}");
        let cfg = gaussian_config(4, 0, 42);
        let (ms, esc) =
            fractional_moment(&cfg, ComplexShift::new(0.0, 1.0), 0.5, 0, 0, 20_000).unwrap();
        assert_eq!(esc, 0);
        assert!(
            (ms.mean - oracle).abs() < 3.0 * ms.stderr,
            "{} vs {oracle} ± {}",
            ms.mean,
            ms.stderr
        );
    }

    #[test]
    fn diagonal_moment_finite_at_real_energy() {
        // spectral averaging keeps the s-moment finite at ε = 0; the L=0
        // oracle is ∫ |v|^{-s} ρ(v) dv with the singularity handled exactly
        let s = 0.3;
        let rho = DensitySpec::<Real>::standard_gaussian();
        let oracle =
            quad::integrate_with_power_weight(&|v: Real| rho.eval(v), -13.5, 13.5, 0.0, s, 1e-11)
                .value;
        let cfg = gaussian_config(3, 0, 8);
        let (ms, _) = fractional_moment(&cfg, ComplexShift::real(0.0), s, 0, 0, 30_000).unwrap();
        assert!(
            (ms.mean - oracle).abs() < 4.0 * ms.stderr,
            "{} vs {oracle} ± {}",
            ms.mean,
            ms.stderr
        );
    }

    #[test]
    fn profile_diagonal_case_is_positive_then_zero() {
        let cfg = gaussian_config(8, 0, 4);
        let p = decay_profile(&cfg, ComplexShift::new(0.0, 0.5), 0.3, 0, 5, 200).unwrap();
        assert!(p.rows[0].estimate > 0.0);
        for r in &p.rows[1..] {
            assert_eq!(r.estimate, 0.0);
        }
        // degenerate input for the fit
        let err = decay_fit(&p, 1).unwrap_err();
        assert!(matches!(err, Error::InsufficientDecayRange { .. }));
    }

    #[test]
    fn decay_fit_recovers_synthetic_rate() {
        // C e^{-0.5 d} with 1% multiplicative noise → α ∈ [0.45, 0.55]
        let mut rows = Vec::new();
        let noise = [
            0.004, -0.007, 0.009, -0.002, 0.006, -0.008, 0.001, 0.005, -0.004, 0.007, -0.006,
            0.003, -0.001, 0.008, -0.009, 0.002,
        ];
        for d in 0..16usize {
            let est = 2.0 * (-0.5 * d as Real).exp() * (1.0 + noise[d]);
            rows.push(ProfileRow {
                distance: d,
                estimate: est,
                stderr: est * 0.01,
                samples: 1000,
            });
        }
        let profile = FracMomentProfile {
            s: 0.3,
            shift: ComplexShift::real(0.0),
            rows,
            half_size: 100,
            half_bandwidth: 1,
            escalated: 0,
        };
        let fit = decay_fit(&profile, 0).unwrap();
        assert!(fit.alpha > 0.45 && fit.alpha < 0.55, "alpha {}", fit.alpha);
        assert!(fit.alpha_ci.0 > 0.0);
        assert!(fit.r_squared > 0.99);
        // the fit reproduces its inputs within the stated residual scale
        for (i, &d) in fit.distances_used.iter().enumerate() {
            let want = profile.rows[d].estimate;
            let got = fit.predicted(d);
            assert!(
                (got.ln() - want.ln()).abs() < 0.05,
                "d={d}: {got} vs {want} ({i})"
            );
        }
    }

    #[test]
    fn flat_profile_has_ci_containing_zero() {
        let rows: Vec<ProfileRow> = (0..10)
            .map(|d| ProfileRow {
                distance: d,
                estimate: 1.0 + if d % 2 == 0 { 0.001 } else { -0.001 },
                stderr: 0.01,
                samples: 1000,
            })
            .collect();
        let profile = FracMomentProfile {
            s: 0.3,
            shift: ComplexShift::real(0.0),
            rows,
            half_size: 100,
            half_bandwidth: 1,
            escalated: 0,
        };
        let fit = decay_fit(&profile, 0).unwrap();
        assert!(
            fit.alpha_ci.0 < 0.0 && fit.alpha_ci.1 > 0.0,
            "{:?}",
            fit.alpha_ci
        );
    }

    #[test]
    fn spectral_averaging_l0_bound() {
        // E|Im G_jj(0 + 0.05i)| = π (ρ*P_ε)(0) ≈ 1.2048, below π‖ρ‖∞ ≈ 1.2533
        let cfg = gaussian_config(4, 0, 6);
        let grid = [ComplexShift::new(0.0, 0.05)];
        let rep = spectral_averaging_sup(&cfg, 0.5, &grid, 20_000).unwrap();
        let bound = std::f64::consts::PI * cfg.density().sup_norm();
        assert!(rep.sup_abs_im <= bound, "{} vs {bound}", rep.sup_abs_im);
        let want = std::f64::consts::PI * 0.3835125062;
        let row = &rep.rows[0];
        assert!(
            (row.abs_im_diag.mean - want).abs() < 3.0 * row.abs_im_diag.stderr,
            "{} vs {want}",
            row.abs_im_diag.mean
        );
    }

    #[test]
    fn spectral_averaging_far_energy_is_tiny() {
        let cfg = gaussian_config(10, 1, 7);
        let grid = [ComplexShift::real(100.0)];
        let rep = spectral_averaging_sup(&cfg, 0.5, &grid, 300).unwrap();
        // ‖G‖ ≤ 1/dist(z, spectrum) ≈ 1/97; s-moment ≈ |E|^{-1/2}
        assert!(rep.sup_diag < 0.15, "{}", rep.sup_diag);
        assert!(rep.sup_diag > 0.05);
    }

    #[test]
    fn volume_difference_zero_for_equal_sizes() {
        let cfg = gaussian_config(12, 1, 5);
        let vd =
            volume_difference_decay(&cfg, 12, 0, ComplexShift::new(0.0, 1.0), 0.05, 150).unwrap();
        assert_eq!(vd.abs_diff.mean, 0.0);
        assert_eq!(vd.reduced_form_s_moment.mean, 0.0);
    }

    #[test]
    fn volume_difference_l0_is_exactly_zero() {
        // G_jj depends only on v_jj at L = 0, so the coupled difference vanishes
        let cfg = gaussian_config(12, 0, 5);
        let vd =
            volume_difference_decay(&cfg, 6, 0, ComplexShift::new(0.0, 1.0), 0.05, 150).unwrap();
        assert_eq!(vd.abs_diff.mean, 0.0);
    }

    #[test]
    fn coupling_identity_matches_direct_subtraction() {
        // at small M the direct subtraction is still accurate; the identity
        // route must agree sample by sample
        let cfg_n = gaussian_config(12, 1, 99);
        let cfg_m = cfg_n.with_half_size(4).unwrap();
        let z = ComplexShift::new(0.0, 1.0);
        for idx in 0..40u64 {
            let (ident, _) = {
                let v = volume_diff_sample(&cfg_n, &cfg_m, 0, z, 0.05, idx);
                (v.0, v.1)
            };
            let h_n = cfg_n.sample(idx);
            let h_m = cfg_m.sample(idx);
            let g_n = bandlu::green_entry(&h_n, z.value(), 12, 12).unwrap();
            let g_m = bandlu::green_entry(&h_m, z.value(), 4, 4).unwrap();
            let direct = (g_n - g_m).norm();
            assert!(
                (ident - direct).abs() < 1e-10 * (1.0 + direct),
                "sample {idx}: identity {ident} vs direct {direct}"
            );
        }
    }

    #[test]
    fn volume_difference_insensitive_to_doubling_n() {
        let cfg_a = gaussian_config(24, 1, 31);
        let cfg_b = gaussian_config(48, 1, 31);
        let z = ComplexShift::new(0.0, 1.0);
        let va = volume_difference_decay(&cfg_a, 8, 0, z, 0.05, 800).unwrap();
        let vb = volume_difference_decay(&cfg_b, 8, 0, z, 0.05, 800).unwrap();
        let tol = 2.0 * (va.abs_diff.stderr + vb.abs_diff.stderr);
        assert!(
            (va.abs_diff.mean - vb.abs_diff.mean).abs() <= tol,
            "{} vs {}",
            va.abs_diff.mean,
            vb.abs_diff.mean
        );
    }

    #[test]
    fn volume_difference_validates_inputs() {
        let cfg = gaussian_config(12, 1, 5);
        let z = ComplexShift::new(0.0, 1.0);
        assert!(volume_difference_decay(&cfg, 4, 4, z, 0.05, 100).is_err()); // |j| > M - L
        assert!(volume_difference_decay(&cfg, 4, 0, z, 0.2, 100).is_err()); // s ≥ 1/9
        assert!(volume_difference_decay(&cfg, 4, 0, ComplexShift::real(0.0), 0.05, 100).is_err());
    }

    #[test]
    fn reduced_resolvent_rejects_l0_and_bad_indices() {
        let cfg0 = gaussian_config(8, 0, 2);
        let z = ComplexShift::new(0.0, 1.0);
        assert!(reduced_resolvent_decay(&cfg0, 0, 1, 8, z, 0.2, 100).is_err());
        let cfg = gaussian_config(8, 1, 2);
        assert!(reduced_resolvent_decay(&cfg, 0, 0, 8, z, 0.2, 100).is_err()); // i == j
        assert!(reduced_resolvent_decay(&cfg, 0, 3, 8, z, 0.2, 100).is_err()); // |i-j| > L
        assert!(reduced_resolvent_decay(&cfg, 0, 1, 0, z, 0.2, 100).is_err()); // k not near edge
        assert!(reduced_resolvent_decay(&cfg, 0, 1, 8, z, 0.4, 100).is_err()); // s ≥ 1/3
        assert!(reduced_resolvent_decay(&cfg, 0, 1, 8, z, 0.2, 100).is_ok());
    }

    #[test]
    fn reduced_resolvent_decays_with_size() {
        let z = ComplexShift::new(0.0, 1.0);
        let mut prev = Real::INFINITY;
        for &n in &[6usize, 12, 24] {
            let cfg = gaussian_config(n, 1, 13);
            let (ms, _) = reduced_resolvent_decay(&cfg, 0, 1, n as i64, z, 0.2, 400).unwrap();
            assert!(ms.mean < prev, "N={n}: {} vs prev {prev}", ms.mean);
            prev = ms.mean;
        }
    }

    #[test]
    fn profiles_replay_bit_exactly() {
        let cfg = gaussian_config(20, 1, 909);
        let z = ComplexShift::new(0.1, 0.2);
        let a = decay_profile(&cfg, z, 0.3, 0, 8, 150).unwrap();
        let b = decay_profile(&cfg, z, 0.3, 0, 8, 150).unwrap();
        for (ra, rb) in a.rows.iter().zip(b.rows.iter()) {
            assert_eq!(ra.estimate.to_bits(), rb.estimate.to_bits());
            assert_eq!(ra.stderr.to_bits(), rb.stderr.to_bits());
        }
    }

    #[test]
    fn real_energy_estimates_stable_under_doubling() {
        // heavy tails are tamed by s < 1: doubling the sample count moves the
        // estimate by less than 3 combined standard errors
        let cfg = gaussian_config(30, 1, 303);
        let z = ComplexShift::real(0.0);
        let (a, _) = fractional_moment(&cfg, z, 0.3, 0, 3, 2000).unwrap();
        let (b, _) = fractional_moment(&cfg, z, 0.3, 0, 3, 4000).unwrap();
        assert!(
            (a.mean - b.mean).abs() < 3.0 * (a.stderr + b.stderr),
            "{} vs {}",
            a.mean,
            b.mean
        );
    }

    #[test]
    fn profile_center_respects_spectral_averaging_sup() {
        // the d = 0 profile entry is the diagonal s-moment; it cannot exceed
        // the measured supremum over a grid containing the same shift
        let cfg = gaussian_config(15, 1, 47);
        let z = ComplexShift::new(0.0, 0.1);
        let profile = decay_profile(&cfg, z, 0.4, 0, 5, 1500).unwrap();
        let grid = [z, ComplexShift::new(0.5, 0.1), ComplexShift::new(0.0, 0.5)];
        let sup = spectral_averaging_sup(&cfg, 0.4, &grid, 1500).unwrap();
        assert!(
            profile.rows[0].estimate <= sup.sup_diag + 3.0 * profile.rows[0].stderr,
            "{} vs sup {}",
            profile.rows[0].estimate,
            sup.sup_diag
        );
    }

    #[test]
    fn lower_decoupling_ratio_near_one_for_large_eta() {
        let rho = DensitySpec::<Real>::standard_gaussian();
        let betas: Vec<Real> = (-3..=3).map(|b| b as Real).collect();
        let rep = decoupling_lower_check(&rho, 0.5, &[20.0], &betas).unwrap();
        let row = &rep.rows[0];
        // oracle: at β = 0, LHS/RHS = 4.4714/… → C/η ≈ 0.95–1.0
        assert!(
            row.c_over_eta > 0.9 && row.c_over_eta < 1.05,
            "C/η = {}",
            row.c_over_eta
        );
    }

    #[test]
    fn lower_decoupling_s_to_zero_limit() {
        // s → 0: both integrands → 1, the ratio → 1
        let rho = DensitySpec::<Real>::standard_gaussian();
        let rep = decoupling_lower_check(&rho, 0.01, &[50.0], &[0.0]).unwrap();
        assert!(
            (rep.rows[0].inf_ratio - 1.0).abs() < 0.05,
            "{:?}",
            rep.rows[0]
        );
    }

    #[test]
    fn upper_decoupling_gaussian_case() {
        let rho = DensitySpec::<Real>::standard_gaussian();
        // p(u) = u, q(u) = u² + 1 → ratio ≈ 0.9012 (quadrature oracle)
        let case = PolyCase {
            p: (0.0, 1.0),
            q: (1.0, 0.0, 1.0),
        };
        let rep = decoupling_upper_check(&rho, 0.3, &[case]).unwrap();
        assert!(
            (rep.rows[0].ratio - 0.9012476699).abs() < 1e-6,
            "{:?}",
            rep.rows[0]
        );

        // constant polynomials: ratio = ∫|u|^s ρ du
        let const_case = PolyCase {
            p: (1.0, 0.0),
            q: (1.0, 0.0, 0.0),
        };
        let rep = decoupling_upper_check(&rho, 0.3, &[const_case]).unwrap();
        let want = quad::integrate(
            &|u: Real| u.abs().powf(0.3) * rho.eval(u),
            -13.5,
            13.5,
            1e-11,
        )
        .value;
        assert!((rep.rows[0].ratio - want).abs() < 1e-8);

        // scaling p → 2p leaves the ratio invariant
        let scaled = PolyCase {
            p: (0.0, 2.0),
            q: (1.0, 0.0, 1.0),
        };
        let rep2 = decoupling_upper_check(&rho, 0.3, &[case, scaled]).unwrap();
        assert!((rep2.rows[0].ratio - rep2.rows[1].ratio).abs() < 1e-9);
    }

    #[test]
    fn upper_decoupling_rejects_real_roots_and_large_s() {
        let rho = DensitySpec::<Real>::standard_gaussian();
        let bad_q = PolyCase {
            p: (0.0, 1.0),
            q: (-1.0, 0.0, 1.0), // roots ±1
        };
        assert!(decoupling_upper_check(&rho, 0.3, &[bad_q]).is_err());
        let ok = PolyCase {
            p: (0.0, 1.0),
            q: (1.0, 0.0, 1.0),
        };
        assert!(decoupling_upper_check(&rho, 0.5, &[ok]).is_err());
    }
}
