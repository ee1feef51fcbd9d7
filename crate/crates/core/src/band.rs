//! Symmetric banded matrices and the random band ensemble.
//!
//! A matrix of order n = 2N+1 with half-bandwidth L keeps only the diagonal
//! and L subdiagonals; symmetry is a storage contract and is never
//! materialized outside test oracles. Ensemble entries are iid draws from the
//! single-site density, scaled by 1/√(2L+1), addressed by *position key* so
//! that the matrix of half-size M < N from the same stream is exactly the
//! central restriction of the larger one.

use crate::density::{DensityConfig, DensitySpec};
use crate::error::{Error, Result};
use crate::rng::{pair_key, RngStream};
use crate::scalar::Scalar;
use serde::{Deserialize, Serialize};

/// Symmetric banded matrix, lower-triangle storage.
/// `diags[d][i]` holds entry (i+d, i) = (i, i+d) for d = 0..=L.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix<T> {
    order: usize,
    half_bandwidth: usize,
    diags: Vec<Vec<T>>,
}

impl<T: Scalar> BandMatrix<T> {
    pub fn zero(order: usize, half_bandwidth: usize) -> Self {
        assert!(order > 0);
        assert!(half_bandwidth < order, "half-bandwidth must be < order");
        let diags = (0..=half_bandwidth)
            .map(|d| vec![T::zero(); order - d])
            .collect();
        BandMatrix {
            order,
            half_bandwidth,
            diags,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    /// Row/column index of the center site (absolute index 0).
    pub fn center(&self) -> usize {
        self.order / 2
    }

    /// Entry (i, j) with 0-based indices, using symmetry.
    pub fn get(&self, i: usize, j: usize) -> T {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        if d > self.half_bandwidth {
            T::zero()
        } else {
            self.diags[d][lo]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let (lo, hi) = if i <= j { (i, j) } else { (j, i) };
        let d = hi - lo;
        assert!(d <= self.half_bandwidth, "index outside band");
        self.diags[d][lo] = v;
    }

    pub fn diagonal(&self, d: usize) -> &[T] {
        &self.diags[d]
    }

    /// Dense symmetric expansion (test oracles, Appendix-style checks).
    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let n = self.order;
        let mut a = vec![vec![T::zero(); n]; n];
        for d in 0..=self.half_bandwidth {
            for i in 0..n - d {
                a[i + d][i] = self.diags[d][i];
                a[i][i + d] = self.diags[d][i];
            }
        }
        a
    }

    /// y = H x.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        let n = self.order;
        assert_eq!(x.len(), n);
        let mut y = vec![T::zero(); n];
        for i in 0..n {
            y[i] += self.diags[0][i] * x[i];
        }
        for d in 1..=self.half_bandwidth {
            for i in 0..n - d {
                let v = self.diags[d][i];
                y[i + d] += v * x[i];
                y[i] += v * x[i + d];
            }
        }
        y
    }

    /// Infinity norm (max absolute row sum).
    pub fn inf_norm(&self) -> T {
        let n = self.order;
        let mut rows = vec![T::zero(); n];
        for d in 0..=self.half_bandwidth {
            for i in 0..n - d {
                let a = self.diags[d][i].abs();
                rows[i + d] += a;
                if d > 0 {
                    rows[i] += a;
                }
            }
        }
        rows.into_iter()
            .fold(T::zero(), |m, r| if r > m { r } else { m })
    }

    /// Product of two symmetric banded matrices that commute (powers of a
    /// common matrix); the result is symmetric banded with summed bandwidths.
    pub fn mul_band(&self, other: &BandMatrix<T>) -> BandMatrix<T> {
        let n = self.order;
        assert_eq!(n, other.order);
        let bw = (self.half_bandwidth + other.half_bandwidth).min(n - 1);
        let mut out = BandMatrix::zero(n, bw);
        for d in 0..=bw {
            for i in 0..n - d {
                let r = i + d;
                // C[r][i] = Σ_k A[r][k] B[k][i]
                let k_lo = r
                    .saturating_sub(self.half_bandwidth)
                    .max(i.saturating_sub(other.half_bandwidth));
                let k_hi = (r + self.half_bandwidth)
                    .min(i + other.half_bandwidth)
                    .min(n - 1);
                let mut acc = T::zero();
                let mut k = k_lo;
                while k <= k_hi {
                    acc += self.get(r, k) * other.get(k, i);
                    k += 1;
                }
                out.diags[d][i] = acc;
            }
        }
        out
    }

    /// Diagonal entries of H^p (p >= 1) by repeated banded multiplication.
    /// Exact (no eigensolve); used for interior-trace moment estimates.
    pub fn power_diagonal(&self, p: u32) -> Vec<T> {
        assert!(p >= 1);
        if p == 1 {
            return self.diags[0].clone();
        }
        let mut acc = self.clone();
        for _ in 1..p {
            acc = self.mul_band(&acc);
        }
        acc.diags[0].clone()
    }

    /// The diagonal sub-block on rows/columns [lo, lo+len).
    pub fn sub_block(&self, lo: usize, len: usize) -> BandMatrix<T> {
        assert!(lo + len <= self.order && len > 0);
        let bw = self.half_bandwidth.min(len - 1);
        let mut out = BandMatrix::zero(len, bw);
        for d in 0..=bw {
            for i in 0..len - d {
                out.diags[d][i] = self.get(lo + i + d, lo + i);
            }
        }
        out
    }

    /// H with row and column `j` (0-based) set to zero; band structure kept.
    pub fn reduced(&self, j: usize) -> BandMatrix<T> {
        assert!(j < self.order);
        let mut out = self.clone();
        for d in 0..=self.half_bandwidth {
            // entries (j, j-d) and (j+d, j)
            if j >= d {
                out.diags[d][j - d] = T::zero();
            }
            if j + d < self.order {
                out.diags[d][j] = T::zero();
            }
        }
        out
    }
}

/// Ensemble parameters: order 2N+1, half-bandwidth L, single-site density,
/// master seed. Immutable for a run.
#[derive(Debug, Clone)]
pub struct EnsembleConfig<T: Scalar> {
    half_size: usize,
    half_bandwidth: usize,
    density: DensitySpec<T>,
    master_seed: u64,
}

impl<T: Scalar> EnsembleConfig<T> {
    pub fn new(
        half_size: usize,
        half_bandwidth: usize,
        density: DensitySpec<T>,
        master_seed: u64,
    ) -> Result<Self> {
        if half_bandwidth > 2 * half_size {
            return Err(Error::InvalidConfig(format!(
                "half-bandwidth L = {half_bandwidth} exceeds 2N = {}",
                2 * half_size
            )));
        }
        Ok(EnsembleConfig {
            half_size,
            half_bandwidth,
            density,
            master_seed,
        })
    }

    pub fn half_size(&self) -> usize {
        self.half_size
    }

    pub fn order(&self) -> usize {
        2 * self.half_size + 1
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    pub fn density(&self) -> &DensitySpec<T> {
        &self.density
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    /// Same ensemble at a different half-size (shared density, seed, L);
    /// used for coupled volume-difference builds.
    pub fn with_half_size(&self, half_size: usize) -> Result<Self> {
        EnsembleConfig::new(
            half_size,
            self.half_bandwidth,
            self.density.clone(),
            self.master_seed,
        )
    }

    pub fn with_seed(&self, master_seed: u64) -> Self {
        EnsembleConfig {
            master_seed,
            ..self.clone()
        }
    }

    /// Raw draw v_ij (no 1/√(2L+1) scaling) for absolute indices i, j in
    /// [-N, N]; symmetric in (i, j) and independent of the matrix size.
    pub fn raw_draw(&self, sample_index: u64, i: i64, j: i64) -> T {
        let stream = RngStream::new(self.master_seed, sample_index);
        self.density.sample_at(&stream, pair_key(i, j))
    }

    /// Draw the sample with the given index: bit-identical for identical
    /// (config, sample_index) pairs.
    pub fn sample(&self, sample_index: u64) -> BandMatrix<T> {
        let n = self.order();
        let nn = self.half_size as i64;
        let scale = T::of_usize(2 * self.half_bandwidth + 1).sqrt();
        let stream = RngStream::new(self.master_seed, sample_index);
        let mut m = BandMatrix::zero(n, self.half_bandwidth);
        for d in 0..=self.half_bandwidth {
            for col in 0..n - d {
                let i = col as i64 - nn;
                let j = i + d as i64;
                m.diags[d][col] = self.density.sample_at(&stream, pair_key(i, j)) / scale;
            }
        }
        m
    }
}

/// Config-file form of the ensemble block (keys: N, L, seed, density).
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EnsembleParams {
    #[serde(rename = "N")]
    pub half_size: usize,
    #[serde(rename = "L")]
    pub half_bandwidth: usize,
    pub seed: u64,
    pub density: DensityConfig,
}

impl EnsembleParams {
    pub fn build(&self) -> Result<EnsembleConfig<f64>> {
        EnsembleConfig::new(
            self.half_size,
            self.half_bandwidth,
            self.density.build()?,
            self.seed,
        )
    }
}
