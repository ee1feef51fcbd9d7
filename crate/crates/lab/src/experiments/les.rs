//! Local-eigenvalue-statistics experiment: the ε-ladder intensity estimate at
//! E₀ (center-entry resolvent), window counts against Poisson, the gap
//! statistic on a wider window, and the block-superposition comparison.

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::output::{fmt_f64, write_csv, write_json};
use crate::pool::parallel_map;
use rbm_core::dos::{self, reduce_resolvent_rows, EPS_LADDER};
use rbm_core::les::{
    block_superposed_process, count_statistics, poisson_gof, window_realization, Window,
};
use rbm_core::stats;
use rbm_core::{EnsembleConfig, Real};
use serde_json::json;

use super::RunSummary;

/// ε-ladder center-entry intensity estimate n_L(E₀).
pub fn estimate_intensity(
    ensemble: &EnsembleConfig<Real>,
    e0: Real,
    samples: usize,
    workers: usize,
) -> Result<stats::MeanStderr> {
    let grid = [e0];
    let ladder = EPS_LADDER.to_vec();
    let weights = stats::extrapolation_weights(&ladder);
    let rows = parallel_map(samples, workers, |i| {
        dos::resolvent_ladder_sample_row(ensemble, &grid, &ladder, &weights, true, i as u64)
    })?;
    let est = reduce_resolvent_rows(&grid, &rows, 0.0);
    Ok(stats::MeanStderr {
        mean: est.values[0],
        stderr: est.stderr[0],
        n: samples,
    })
}

pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    let ensemble = config.build_ensemble()?;
    let p = &config.les;
    let workers = config.workers;

    let intensity = estimate_intensity(&ensemble, p.e0, p.intensity_samples, workers)?;
    if !(intensity.mean > 0.0) {
        return Err(LabError::Runtime(format!(
            "estimated intensity {} not positive at E0 = {}",
            intensity.mean, p.e0
        )));
    }

    // count window with λ ≈ lambda_target
    let window = Window::centered(p.lambda_target / intensity.mean);
    let realizations = parallel_map(p.realizations, workers, |i| {
        window_realization(&ensemble, p.e0, window, i as u64)
    })?;
    let counts = count_statistics(&realizations).map_err(LabError::from)?;
    let gof = poisson_gof(&counts, &realizations, intensity.mean).map_err(LabError::from)?;

    // wider window for the gap statistic (edge bias ~ E[gap]/width)
    let gap_window = Window::centered(p.gap_lambda / intensity.mean);
    let gap_realizations = parallel_map(p.realizations, workers, |i| {
        window_realization(&ensemble, p.e0, gap_window, i as u64)
    })?;
    let gap_counts = count_statistics(&gap_realizations).map_err(LabError::from)?;
    let gap_gof =
        poisson_gof(&gap_counts, &gap_realizations, intensity.mean).map_err(LabError::from)?;

    // block superposition at the count window
    let block = if p.block_compare {
        let rows = parallel_map(p.realizations, workers, |i| {
            block_superposed_process(&ensemble, p.e0, window, p.alpha, i as u64).map(|r| r.count())
        })?;
        let mut counts_block = Vec::with_capacity(rows.len());
        for r in rows {
            counts_block.push(r.map_err(LabError::from)? as Real);
        }
        Some(stats::mean_stderr(&counts_block))
    } else {
        None
    };

    let counts_path = config.out.join("counts.csv");
    write_csv(
        &counts_path,
        &["k", "frequency", "poisson_prob"],
        &counts
            .histogram
            .iter()
            .map(|(&k, &c)| {
                vec![
                    k.to_string(),
                    c.to_string(),
                    fmt_f64(stats::poisson_pmf(k, gof.lambda)),
                ]
            })
            .collect::<Vec<_>>(),
    )?;

    let mut outputs = vec![counts_path];

    if p.persist_points {
        let mut lines = String::new();
        for r in &realizations {
            lines.push_str(
                &serde_json::to_string(&json!({
                    "sample_index": r.sample_index,
                    "points": r.points,
                }))
                .map_err(|e| LabError::Runtime(format!("json: {e}")))?,
            );
            lines.push('\n');
        }
        let points_path = config.out.join("points.jsonl");
        std::fs::write(&points_path, lines)?;
        outputs.push(points_path);
    }

    let gof_path = config.out.join("gof.json");
    write_json(
        &gof_path,
        &json!({
            "intensity": {"value": intensity.mean, "stderr": intensity.stderr, "samples": p.intensity_samples},
            "window": {"lo": window.lo, "hi": window.hi},
            "lambda": gof.lambda,
            "tv_distance": gof.tv_distance,
            "k_max": gof.k_max,
            "chi_square_p": gof.chi_square_p,
            "mean_count": {"value": counts.mean, "stderr": counts.mean_stderr},
            "factorial_moments": counts.factorial_moments.iter().map(|m| json!({"value": m.mean, "stderr": m.stderr})).collect::<Vec<_>>(),
            "gap_window": {"lo": gap_window.lo, "hi": gap_window.hi, "lambda": gap_gof.lambda},
            "gap_ks": gap_gof.gap_ks,
            "gap_count": gap_gof.gap_count,
            "block_superposition": block.map(|b| json!({
                "alpha": p.alpha,
                "mean_count": b.mean,
                "stderr": b.stderr,
                "direct_mean": counts.mean,
                "direct_stderr": counts.mean_stderr,
            })),
        }),
    )?;
    outputs.push(gof_path);

    Ok(RunSummary {
        outputs,
        headline: format!(
            "les: n({}) ≈ {:.4}, λ = {:.3}, TV = {:.4}, gap KS = {}",
            p.e0,
            intensity.mean,
            gof.lambda,
            gof.tv_distance,
            gap_gof
                .gap_ks
                .map(|k| format!("{k:.4}"))
                .unwrap_or_else(|| "n/a".into()),
        ),
    })
}
