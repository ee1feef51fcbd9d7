//! Symmetric tridiagonal eigensolvers: implicit-shift QL iteration for the
//! full spectrum and Sturm-count bisection for eigenvalues inside a window.

use crate::scalar::Scalar;

/// All eigenvalues of the symmetric tridiagonal matrix with diagonal `d`
/// (length n) and subdiagonal `e` (length n-1), ascending. Optionally rotates
/// an accumulation matrix `z` (n columns of length n, `z[k][col]` layout
/// row-major: z[row][col]); pass the band-reduction transform to obtain
/// eigenvectors of the original matrix.
pub fn ql_implicit<T: Scalar>(
    d: &mut [T],
    e: &[T],
    mut z: Option<&mut Vec<Vec<T>>>,
) -> Result<(), &'static str> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    let mut off = vec![T::zero(); n];
    off[..n - 1].copy_from_slice(e);

    for l in 0..n {
        let mut iter = 0u32;
        loop {
            // split point: negligible subdiagonal
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if off[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err("QL iteration failed to converge");
            }
            // implicit shift from the 2x2 at l
            let two = T::of(2.0);
            let mut g = (d[l + 1] - d[l]) / (two * off[l]);
            let mut r = g.hypot(T::one());
            let sign_r = if g >= T::zero() { r.abs() } else { -r.abs() };
            g = d[m] - d[l] + off[l] / (g + sign_r);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == T::zero() {
                    // deflate: rotation annihilated prematurely
                    d[i + 1] -= p;
                    off[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(zm) = z.as_deref_mut() {
                    for row in zm.iter_mut() {
                        let f = row[i + 1];
                        row[i + 1] = s * row[i] + c * f;
                        row[i] = c * row[i] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            off[l] = g;
            off[m] = T::zero();
        }
    }
    Ok(())
}

/// Eigenvalues only, sorted ascending.
pub fn eigenvalues<T: Scalar>(diag: &[T], sub: &[T]) -> Vec<T> {
    let mut d = diag.to_vec();
    ql_implicit(&mut d, sub, None).expect("QL convergence");
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    d
}

/// Eigenvalues ascending plus eigenvectors as columns of the returned matrix,
/// with `q0` the prior accumulated transform (identity for a plain
/// tridiagonal). Returned `vectors[row][col]`.
pub fn eigen_with_vectors<T: Scalar>(
    diag: &[T],
    sub: &[T],
    q0: Vec<Vec<T>>,
) -> (Vec<T>, Vec<Vec<T>>) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut z = q0;
    ql_implicit(&mut d, sub, Some(&mut z)).expect("QL convergence");
    // sort ascending, permute columns accordingly
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let vals: Vec<T> = idx.iter().map(|&k| d[k]).collect();
    let mut vecs = vec![vec![T::zero(); n]; n];
    for (new_col, &old_col) in idx.iter().enumerate() {
        for row in 0..n {
            vecs[row][new_col] = z[row][old_col];
        }
    }
    (vals, vecs)
}

/// Number of eigenvalues strictly below `x` (Sturm count via the LDLᵀ
/// recurrence of T - xI).
pub fn sturm_count<T: Scalar>(diag: &[T], sub: &[T], x: T) -> usize {
    let n = diag.len();
    let mut count = 0usize;
    let mut q = diag[0] - x;
    if q < T::zero() {
        count += 1;
    }
    for i in 1..n {
        let b2 = sub[i - 1] * sub[i - 1];
        if q == T::zero() {
            // x collides with a leading-block eigenvalue; nudge
            q = T::epsilon() * (T::one() + b2.sqrt());
        }
        q = diag[i] - x - b2 / q;
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// Eigenvalues in the half-open window [lo, hi), ascending, each refined by
/// bisection to ~machine precision. Cost O(n) per count, O(n log(1/ulp)) per
/// eigenvalue; intended for narrow windows of very large matrices.
pub fn eigenvalues_in_window<T: Scalar>(diag: &[T], sub: &[T], lo: T, hi: T) -> Vec<T> {
    assert!(lo <= hi);
    let k_lo = sturm_count(diag, sub, lo);
    let k_hi = sturm_count(diag, sub, hi);
    let mut out = Vec::with_capacity(k_hi.saturating_sub(k_lo));
    let scale = diag
        .iter()
        .map(|v| v.abs())
        .chain(sub.iter().map(|v| v.abs()))
        .fold(T::one(), |m, v| if v > m { v } else { m });
    let tol = T::epsilon() * scale * T::of(4.0);
    let mut floor = lo;
    for idx in k_lo..k_hi {
        // bisect for the (idx+1)-th smallest eigenvalue; eigenvalues come out
        // ascending, so the previous one tightens the lower bracket
        let mut a = floor;
        let mut b = hi;
        while b - a > tol {
            let mid = (a + b) * T::of(0.5);
            if sturm_count(diag, sub, mid) <= idx {
                a = mid;
            } else {
                b = mid;
            }
        }
        let v = (a + b) * T::of(0.5);
        floor = a;
        out.push(v);
    }
    out
}
