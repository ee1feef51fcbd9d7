//! Semigroup identity checks: the resolvent integral representation on
//! [0, T] with its analytic tail bound, and the Duhamel identity with the
//! interpolation bound over random normal pairs with nonnegative imaginary
//! parts. Every residual is printed; any violation is a runtime failure.

use crate::config::ExperimentConfig;
use crate::error::{LabError, Result};
use crate::output::{fmt_f64, write_csv, write_json};
use rbm_core::linalg::cdense::CMatrix;
use rbm_core::linalg::identities::{check_duhamel, check_resolvent_integral};
use rbm_core::{Cplx, Real, RngStream};
use serde_json::json;

use super::RunSummary;

/// Random real orthogonal matrix as a product of Givens rotations.
fn random_orthogonal(n: usize, stream: &mut RngStream) -> Vec<Vec<Real>> {
    let mut q = vec![vec![0.0; n]; n];
    for (i, row) in q.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for _ in 0..(4 * n) {
        let a = (stream.next_u64() % n as u64) as usize;
        let mut b = (stream.next_u64() % n as u64) as usize;
        if a == b {
            b = (b + 1) % n;
        }
        let theta = 2.0 * std::f64::consts::PI * stream.next_uniform();
        let (c, s) = (theta.cos(), theta.sin());
        for row in q.iter_mut() {
            let (x, y) = (row[a], row[b]);
            row[a] = c * x - s * y;
            row[b] = s * x + c * y;
        }
    }
    q
}

/// Random normal matrix with nonnegative imaginary part:
/// Q·diag(λ_re + iλ_im)·Qᵀ with λ_im ≥ 0 and Q real orthogonal.
pub fn random_normal_matrix(n: usize, stream: &mut RngStream) -> CMatrix<Real> {
    let q = random_orthogonal(n, stream);
    let lam: Vec<Cplx> = (0..n)
        .map(|_| {
            Cplx::new(
                2.0 * stream.next_uniform() - 1.0,
                stream.next_uniform(), // ≥ 0
            )
        })
        .collect();
    CMatrix::from_fn(n, |i, j| {
        let mut acc = Cplx::new(0.0, 0.0);
        for k in 0..n {
            acc += lam[k] * q[i][k] * q[j][k];
        }
        acc
    })
}

pub fn run(config: &ExperimentConfig) -> Result<RunSummary> {
    let p = &config.identities;
    let mut stream = RngStream::new(config.ensemble.seed, 0);
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut worst_resolvent: Real = 0.0;
    let mut worst_duhamel: Real = 0.0;
    let mut worst_slack: Real = Real::INFINITY;
    let mut failures = 0usize;

    // resolvent integral representation on a spread of shifts and sizes
    for (case, &(n, e, eps)) in [
        (1usize, 0.0, 1.0),
        (2, 0.0, 1.0),
        (3, 0.5, 0.5),
        (4, -0.7, 0.25),
        (5, 0.2, 1.5),
    ]
    .iter()
    .enumerate()
    {
        let mut a = CMatrix::zeros(n);
        for i in 0..n {
            a[(i, i)] = Cplx::new(2.0 * stream.next_uniform() - 1.0, 0.0);
            for j in 0..i {
                let v = Cplx::new(stream.next_uniform() - 0.5, 0.0);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        // cutoff from the tail bound: e^{-εT}/ε ≤ tol/10
        let cutoff = ((10.0 / (p.resolvent_tol * eps)).ln() / eps).max(5.0);
        let rep = check_resolvent_integral(&a, e, eps, cutoff);
        let pass = rep.residual <= p.resolvent_tol;
        if !pass {
            failures += 1;
        }
        worst_resolvent = worst_resolvent.max(rep.residual);
        rows.push(vec![
            "resolvent-integral".into(),
            case.to_string(),
            fmt_f64(rep.residual),
            fmt_f64(rep.tail_bound),
            pass.to_string(),
        ]);
        println!(
            "resolvent-integral case {case}: residual {:.3e} (tail bound {:.3e}) {}",
            rep.residual,
            rep.tail_bound,
            if pass { "ok" } else { "FAIL" }
        );
    }

    // Duhamel identity + interpolation bound over random normal pairs
    for case in 0..p.pairs {
        let n = 2 + case % 3;
        let a = random_normal_matrix(n, &mut stream);
        let b = random_normal_matrix(n, &mut stream);
        let t = 0.25 + 1.75 * stream.next_uniform();
        let s = stream.next_uniform();
        let rep = check_duhamel(&a, &b, t, s);
        let pass = rep.identity_residual <= p.duhamel_tol && rep.slack() >= -1e-12;
        if !pass {
            failures += 1;
        }
        worst_duhamel = worst_duhamel.max(rep.identity_residual);
        worst_slack = worst_slack.min(rep.slack());
        rows.push(vec![
            "duhamel".into(),
            case.to_string(),
            fmt_f64(rep.identity_residual),
            fmt_f64(rep.slack()),
            pass.to_string(),
        ]);
    }
    println!(
        "duhamel: {} pairs, worst residual {:.3e}, smallest bound slack {:.3e}",
        p.pairs, worst_duhamel, worst_slack
    );

    let csv_path = config.out.join("identities.csv");
    write_csv(
        &csv_path,
        &["check", "case", "residual", "bound_or_slack", "pass"],
        &rows,
    )?;
    let json_path = config.out.join("identities.json");
    write_json(
        &json_path,
        &json!({
            "worst_resolvent_residual": worst_resolvent,
            "worst_duhamel_residual": worst_duhamel,
            "smallest_bound_slack": worst_slack,
            "failures": failures,
        }),
    )?;

    if failures > 0 {
        return Err(LabError::Runtime(format!(
            "{failures} identity check(s) exceeded tolerance"
        )));
    }
    Ok(RunSummary {
        outputs: vec![csv_path, json_path],
        headline: format!(
            "identities: residuals ≤ {:.2e} (resolvent), ≤ {:.2e} (duhamel), bound slack ≥ {:.2e}",
            worst_resolvent, worst_duhamel, worst_slack
        ),
    })
}
