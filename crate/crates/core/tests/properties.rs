//! Property tests for the ensemble and kernel contracts.

use proptest::prelude::*;
use rbm_core::linalg::{bandlu, eigenvalues_banded};
use rbm_core::{Cplx, DensitySpec, EnsembleConfig};

fn config(half: usize, l: usize, seed: u64) -> EnsembleConfig<f64> {
    EnsembleConfig::new(half, l, DensitySpec::standard_gaussian(), seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dense_expansion_symmetric_and_banded(half in 1usize..12, l in 0usize..6, seed in 0u64..1000) {
        let l = l.min(2 * half);
        let h = config(half, l, seed).sample(seed);
        let d = h.to_dense();
        let n = h.order();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(d[i][j], d[j][i]);
                if i.abs_diff(j) > l {
                    prop_assert_eq!(d[i][j], 0.0);
                }
            }
        }
    }

    #[test]
    fn resolvent_is_complex_symmetric(half in 2usize..9, l in 1usize..4, seed in 0u64..500,
                                      e in -1.0f64..1.0, eps in 0.05f64..0.8) {
        let l = l.min(2 * half);
        let h = config(half, l, seed).sample(0);
        let z = Cplx::new(e, eps);
        let n = h.order();
        let j = n / 3;
        let k = 2 * n / 3;
        let a = bandlu::green_entry(&h, z, j, k).unwrap();
        let b = bandlu::green_entry(&h, z, k, j).unwrap();
        prop_assert!((a - b).norm() <= 1e-11 * (1.0 + a.norm()));
    }

    #[test]
    fn resolvent_identity_between_shifts(half in 2usize..7, seed in 0u64..300,
                                         e1 in -0.5f64..0.5, e2 in -0.5f64..0.5) {
        let h = config(half, 1, seed).sample(1);
        let n = h.order();
        let (z1, z2) = (Cplx::new(e1, 0.3), Cplx::new(e2, 0.7));
        let k = n / 2;
        let g1 = bandlu::green_column(&h, z1, k).unwrap();
        let g2 = bandlu::green_column(&h, z2, k).unwrap();
        // G(z1) e_k - G(z2) e_k = (z1 - z2) G(z1) G(z2) e_k
        let lu = bandlu::factor_shifted(&h, z1, bandlu::default_pivot_threshold(&h)).unwrap();
        let mut prod = g2.clone();
        lu.solve(&mut prod);
        for i in 0..n {
            let want = g1[i] - g2[i];
            let got = (z1 - z2) * prod[i];
            prop_assert!((want - got).norm() <= 1e-9 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn window_counts_are_additive(half in 4usize..16, l in 0usize..3, seed in 0u64..200,
                                  split in -1.0f64..1.0) {
        use rbm_core::les::{window_realization, Window};
        let cfg = config(half, l.min(2 * half), seed);
        let whole = Window::new(-2.0, 2.0);
        let left = Window::new(-2.0, split.clamp(-2.0, 2.0));
        let right = Window::new(split.clamp(-2.0, 2.0), 2.0);
        let w = window_realization(&cfg, 0.0, whole, 0);
        let a = window_realization(&cfg, 0.0, left, 0);
        let b = window_realization(&cfg, 0.0, right, 0);
        prop_assert_eq!(w.count(), a.count() + b.count());
    }

    #[test]
    fn lids_is_monotone(seed in 0u64..100, e1 in -2.0f64..2.0, e2 in -2.0f64..2.0) {
        use rbm_core::dos::empirical_lids;
        let cfg = config(6, 1, seed);
        let samples: Vec<_> = (0..40u64)
            .map(|i| eigenvalues_banded(&cfg.sample(i), false))
            .collect();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(empirical_lids(&samples, lo).mean <= empirical_lids(&samples, hi).mean);
    }
}

#[test]
fn lids_derivative_integrates_back() {
    // the numerical derivative of the ℓIDS on a fixed grid integrates back to
    // the ℓIDS difference within 1e-6 (telescoping exactness of differences)
    use rbm_core::dos::empirical_lids;
    let cfg = config(10, 1, 77);
    let samples: Vec<_> = (0..60u64)
        .map(|i| eigenvalues_banded(&cfg.sample(i), false))
        .collect();
    let grid: Vec<f64> = (0..=80).map(|i| -4.0 + 0.1 * i as f64).collect();
    let lids: Vec<f64> = grid
        .iter()
        .map(|&e| empirical_lids(&samples, e).mean)
        .collect();
    let mut integral = 0.0;
    for i in 1..grid.len() {
        let deriv = (lids[i] - lids[i - 1]) / (grid[i] - grid[i - 1]);
        integral += deriv * (grid[i] - grid[i - 1]);
    }
    assert!((integral - (lids[lids.len() - 1] - lids[0])).abs() < 1e-6);
}

#[test]
fn wide_band_histogram_approaches_semicircle_center() {
    // at L = 8 the DOS at the band center sits close to the semicircle value
    // 1/π (the moment ladder tracks the O(1/L) approach; here we pin the
    // large-L proximity itself)
    use rbm_core::dos::{dos_histogram, semicircle_density, BinRule};
    let cfg = config(40, 8, 1234);
    let spectra: Vec<_> = (0..1500u64)
        .map(|i| eigenvalues_banded(&cfg.sample(i), false))
        .collect();
    let est = dos_histogram(&spectra, -0.6, 0.6, BinRule::Width(0.15)).unwrap();
    let center = est
        .grid
        .iter()
        .position(|&e| e.abs() < 0.08)
        .expect("center bin");
    let want = semicircle_density(0.0f64);
    let got = est.values[center];
    assert!(
        (got - want).abs() < 0.03,
        "n_8(0) = {got} vs semicircle {want}"
    );
}

#[test]
fn smoothness_probe_stable_under_bin_refinement() {
    // derivative estimates at the band center agree between bin widths
    // 0.05 and 0.025 within their propagated error bars
    use rbm_core::dos::{dos_histogram, smoothness_probe, BinRule};
    let cfg = config(60, 1, 555);
    let spectra: Vec<_> = (0..4000u64)
        .map(|i| eigenvalues_banded(&cfg.sample(i), false))
        .collect();
    let mut at_center = Vec::new();
    for width in [0.05, 0.025] {
        let est = dos_histogram(&spectra, -1.0, 1.0, BinRule::Width(width)).unwrap();
        let probe = smoothness_probe(&est, 1).unwrap();
        let i = probe
            .energies
            .iter()
            .position(|&e| e.abs() < width * 0.75)
            .unwrap();
        at_center.push((probe.derivatives[i], probe.error_bars[i]));
    }
    let (d1, e1) = at_center[0];
    let (d2, e2) = at_center[1];
    assert!(
        (d1 - d2).abs() <= 3.0 * (e1 + e2) + 0.05,
        "derivative {d1} ± {e1} vs refined {d2} ± {e2}"
    );
}

#[test]
fn histogram_and_resolvent_agree_for_small_bandwidths() {
    // dual-route DOS comparison: counting vs complex solves, L ∈ {0, 1, 2};
    // tolerance = MC error + Poisson-kernel smoothing bias
    use rbm_core::dos::{dos_histogram, dos_resolvent, BinRule};
    for l in 0..=2usize {
        let cfg = config(24, l, 400 + l as u64);
        let spectra: Vec<_> = (0..600u64)
            .map(|i| eigenvalues_banded(&cfg.sample(i), false))
            .collect();
        let hist = dos_histogram(&spectra, -3.0, 3.0, BinRule::Width(0.2)).unwrap();
        let eps = 0.05;
        let grid = hist.grid.clone();
        let resolvent = dos_resolvent(&cfg, &grid, eps, 400, false);
        for i in 0..grid.len() {
            let mc = 3.0 * (hist.stderr[i] + resolvent.stderr[i]);
            // |n'| ≲ 0.5 for these profiles; ε·sup|n'| bounds the smoothing bias
            let smoothing = eps * 0.5 + 0.02;
            assert!(
                (hist.values[i] - resolvent.values[i]).abs() <= mc + smoothing,
                "L={l} E={}: hist {} vs resolvent {}",
                grid[i],
                hist.values[i],
                resolvent.values[i]
            );
        }
    }
}
