//! Decoupling inequality experiment: the lower check over an (η, β) grid and
//! the upper check over a grid of rational cases, all by quadrature.

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::output::{fmt_f64, write_csv, write_json};
use rbm_core::localization::{decoupling_lower_check, decoupling_upper_check, PolyCase};
use serde_json::json;

use super::RunSummary;

/// Rational cases with complex-rooted denominators for the upper check.
pub fn default_poly_grid() -> Vec<PolyCase> {
    vec![
        PolyCase {
            p: (1.0, 0.0),
            q: (1.0, 0.0, 0.0),
        },
        PolyCase {
            p: (0.0, 1.0),
            q: (1.0, 0.0, 1.0),
        },
        PolyCase {
            p: (1.0, 1.0),
            q: (1.0, 0.0, 1.0),
        },
        PolyCase {
            p: (0.0, 2.0),
            q: (1.0, 0.0, 1.0),
        },
        PolyCase {
            p: (0.0, 1.0),
            q: (2.0, 1.0, 1.0),
        },
        PolyCase {
            p: (1.0, -1.0),
            q: (0.5, 0.0, 2.0),
        },
        PolyCase {
            p: (0.5, 1.0),
            q: (4.0, -2.0, 1.0),
        },
    ]
}

pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    let density = config
        .ensemble
        .density
        .build()
        .map_err(|e| LabError::Config(e.to_string()))?;
    let p = &config.decoupling;

    let mut lower_rows = Vec::new();
    for &s in &p.lower_s {
        let rep = decoupling_lower_check(&density, s, &p.eta_grid, &p.beta_grid)
            .map_err(LabError::from)?;
        for row in &rep.rows {
            lower_rows.push(vec![
                fmt_f64(s),
                fmt_f64(row.eta),
                fmt_f64(row.inf_ratio),
                fmt_f64(row.c_over_eta),
                fmt_f64(row.argmin_beta),
            ]);
        }
    }
    let lower_path = config.out.join("decoupling_lower.csv");
    write_csv(
        &lower_path,
        &["s", "eta", "inf_ratio", "c_over_eta", "argmin_beta"],
        &lower_rows,
    )?;

    let upper = decoupling_upper_check(&density, p.upper_s, &default_poly_grid())
        .map_err(LabError::from)?;
    let upper_path = config.out.join("decoupling_upper.csv");
    write_csv(
        &upper_path,
        &["case", "lhs", "rhs", "ratio"],
        &upper
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.case_index.to_string(),
                    fmt_f64(r.lhs),
                    fmt_f64(r.rhs),
                    fmt_f64(r.ratio),
                ]
            })
            .collect::<Vec<_>>(),
    )?;

    let json_path = config.out.join("decoupling.json");
    write_json(
        &json_path,
        &json!({
            "lower_s": p.lower_s,
            "upper_s": upper.s,
            "gamma": upper.gamma,
            "upper_max_ratio": upper.max_ratio,
            "upper_min_ratio": upper.min_ratio,
            "upper_spread": upper.max_ratio / upper.min_ratio,
        }),
    )?;

    Ok(RunSummary {
        outputs: vec![lower_path, upper_path, json_path],
        headline: format!(
            "decoupling: upper C ∈ [{:.4}, {:.4}] at s = {}, lower grid over {} η values",
            upper.min_ratio,
            upper.max_ratio,
            p.upper_s,
            p.eta_grid.len()
        ),
    })
}
