//! Orthogonal reduction of a symmetric banded matrix to tridiagonal form.
//!
//! Givens rotations clean each column below the first subdiagonal, bottom-up;
//! every rotation spawns one bulge a half-bandwidth below the band, which is
//! chased off the matrix in steps of the bandwidth. Work is O(n²·L) on packed
//! band storage (one extra working diagonal holds the transient bulge).
//! Accumulating the transform costs a further O(n) per rotation and is only
//! requested when eigenvectors are wanted.

use crate::band::BandMatrix;
use crate::scalar::Scalar;

/// Packed working copy: `w[d * n + c]` = A[c + d][c] for d = 0..=b+1.
struct Work<T> {
    n: usize,
    b: usize,
    w: Vec<T>,
}

impl<T: Scalar> Work<T> {
    fn new(h: &BandMatrix<T>) -> Self {
        let n = h.order();
        let b = h.half_bandwidth();
        let mut w = vec![T::zero(); (b + 2) * n];
        for d in 0..=b {
            for c in 0..n - d {
                w[d * n + c] = h.get(c + d, c);
            }
        }
        Work { n, b, w }
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> T {
        debug_assert!(r >= c && r - c <= self.b + 1);
        self.w[(r - c) * self.n + c]
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: T) {
        debug_assert!(r >= c && r - c <= self.b + 1);
        self.w[(r - c) * self.n + c] = v;
    }

    /// Apply the symmetric two-sided rotation A ← GᵀAG on the plane
    /// (u, v) = (v-1, v), with G[u][u] = c, G[u][v] = s, G[v][u] = -s.
    fn rotate(&mut self, v: usize, c: T, s: T, q: Option<&mut Vec<Vec<T>>>) {
        let u = v - 1;
        let n = self.n;
        let b = self.b;
        let two = T::of(2.0);

        // rows (u, v) against columns left of u
        let lo = v.saturating_sub(b + 1);
        for col in lo..u {
            let au = self.get(u, col);
            let av = self.get(v, col);
            self.set(u, col, c * au - s * av);
            self.set(v, col, s * au + c * av);
        }

        // the 2x2 pivot block
        let auu = self.get(u, u);
        let avu = self.get(v, u);
        let avv = self.get(v, v);
        self.set(u, u, c * c * auu - two * c * s * avu + s * s * avv);
        self.set(v, v, s * s * auu + two * c * s * avu + c * c * avv);
        self.set(v, u, c * s * (auu - avv) + (c * c - s * s) * avu);

        // columns (u, v) against rows below v
        let hi = (v + b).min(n - 1);
        for row in (v + 1)..=hi {
            let au = self.get(row, u);
            let av = self.get(row, v);
            self.set(row, u, c * au - s * av);
            self.set(row, v, s * au + c * av);
        }

        if let Some(qm) = q {
            for row in qm.iter_mut() {
                let a = row[u];
                let bb = row[v];
                row[u] = c * a - s * bb;
                row[v] = s * a + c * bb;
            }
        }
    }

    /// Zero A[v][c0] by rotating the (v-1, v) plane; returns (c, s) or None
    /// when the entry is already zero.
    fn eliminate(&mut self, v: usize, c0: usize, q: Option<&mut Vec<Vec<T>>>) -> bool {
        let u = v - 1;
        let y = self.get(v, c0);
        if y == T::zero() {
            return false;
        }
        let x = self.get(u, c0);
        let r = x.hypot(y);
        let (c, s) = (x / r, -y / r);
        self.rotate(v, c, s, q);
        // enforce the exact zero (rotation arithmetic leaves rounding dust)
        self.set(v, c0, T::zero());
        true
    }
}

/// Reduce to tridiagonal: returns (diagonal, subdiagonal, optional transform Q
/// with A = Q T Qᵀ).
pub fn tridiagonalize<T: Scalar>(
    h: &BandMatrix<T>,
    want_transform: bool,
) -> (Vec<T>, Vec<T>, Option<Vec<Vec<T>>>) {
    let n = h.order();
    let b = h.half_bandwidth();

    if b <= 1 {
        let diag = h.diagonal(0).to_vec();
        let sub = if b == 1 {
            h.diagonal(1).to_vec()
        } else {
            vec![T::zero(); n.saturating_sub(1)]
        };
        let q = want_transform.then(|| identity(n));
        return (diag, sub, q);
    }

    let mut work = Work::new(h);
    let mut q = want_transform.then(|| identity(n));

    for col in 0..n.saturating_sub(2) {
        // clean column `col` below the first subdiagonal, outermost entry first
        let deepest = (col + b).min(n - 1);
        for row in ((col + 2)..=deepest).rev() {
            if !work.eliminate(row, col, q.as_mut()) {
                continue;
            }
            // chase the bulge: it sits at (v + b, v - 1) after each rotation
            let mut v = row;
            while v + b < n {
                let bulge_row = v + b;
                let bulge_col = v - 1;
                if !work.eliminate(bulge_row, bulge_col, q.as_mut()) {
                    break;
                }
                v = bulge_row;
            }
        }
    }

    let diag: Vec<T> = (0..n).map(|i| work.get(i, i)).collect();
    let sub: Vec<T> = (0..n - 1).map(|i| work.get(i + 1, i)).collect();
    (diag, sub, q)
}

fn identity<T: Scalar>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::band::EnsembleConfig;
    use crate::density::DensitySpec;
    use crate::linalg::tridiag;

    fn random_band(n_half: usize, l: usize, seed: u64) -> BandMatrix<f64> {
        EnsembleConfig::new(n_half, l, DensitySpec::standard_gaussian(), seed)
            .unwrap()
            .sample(0)
    }

    #[test]
    fn transform_reconstructs_matrix() {
        for &(nh, l) in &[(3usize, 2usize), (5, 3), (8, 5), (6, 12)] {
            let h = random_band(nh, l, 17 + l as u64);
            let n = h.order();
            let (d, e, q) = tridiagonalize(&h, true);
            let q = q.unwrap();
            // rebuild Q T Qᵀ
            let mut t = vec![vec![0.0; n]; n];
            for i in 0..n {
                t[i][i] = d[i];
                if i + 1 < n {
                    t[i + 1][i] = e[i];
                    t[i][i + 1] = e[i];
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for k in 0..n {
                        for m in 0..n {
                            acc += q[i][k] * t[k][m] * q[j][m];
                        }
                    }
                    assert!(
                        (acc - h.get(i, j)).abs() < 1e-11,
                        "(n_half={nh}, L={l}) entry ({i},{j}): {acc} vs {}",
                        h.get(i, j)
                    );
                }
            }
            // orthogonality
            for i in 0..n {
                for j in 0..n {
                    let dot: f64 = (0..n).map(|k| q[k][i] * q[k][j]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn eigenvalues_preserved_under_reduction() {
        // reduction + QL against the characteristic polynomial of a known case
        let h = random_band(10, 4, 5);
        let (d, e, _) = tridiagonalize(&h, false);
        let vals = tridiag::eigenvalues(&d, &e);
        // trace and Frobenius norm are orthogonal invariants
        let tr: f64 = (0..h.order()).map(|i| h.get(i, i)).sum();
        assert!((vals.iter().sum::<f64>() - tr).abs() < 1e-10);
        let fro2: f64 = {
            let mut acc = 0.0;
            for i in 0..h.order() {
                for j in 0..h.order() {
                    acc += h.get(i, j) * h.get(i, j);
                }
            }
            acc
        };
        assert!((vals.iter().map(|v| v * v).sum::<f64>() - fro2).abs() < 1e-9);
    }

    #[test]
    fn l1_passthrough_is_exact() {
        let h = random_band(6, 1, 3);
        let (d, e, _) = tridiagonalize(&h, false);
        for i in 0..h.order() {
            assert_eq!(d[i], h.get(i, i));
            if i + 1 < h.order() {
                assert_eq!(e[i], h.get(i + 1, i));
            }
        }
    }
}
