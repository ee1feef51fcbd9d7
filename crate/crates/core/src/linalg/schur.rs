//! Schur-complement block inversion: for an invertible M and an index subset
//! P with invertible complement block, P M^{-1} P restricted to P-coordinates
//! equals (PMP - PMQ (QMQ)^{-1} QMP)^{-1}.

use crate::error::{Error, Result};
use crate::linalg::cdense::CMatrix;
use crate::scalar::Scalar;

/// Returns the |P|×|P| matrix (PMP - PMQ (QMQ)^{-1} QMP)^{-1}, indexed in the
/// order of `p_indices`. A singular QMQ block is reported with a hint to add
/// a positive imaginary shift.
pub fn schur_block_inverse<T: Scalar>(m: &CMatrix<T>, p_indices: &[usize]) -> Result<CMatrix<T>> {
    let n = m.order();
    for &p in p_indices {
        assert!(p < n, "index {p} out of range");
    }
    let in_p = {
        let mut mask = vec![false; n];
        for &p in p_indices {
            assert!(!mask[p], "duplicate index {p}");
            mask[p] = true;
        }
        mask
    };
    let q_indices: Vec<usize> = (0..n).filter(|&i| !in_p[i]).collect();
    let np = p_indices.len();
    let nq = q_indices.len();

    if nq == 0 {
        let mpp = CMatrix::from_fn(np, |i, j| m[(p_indices[i], p_indices[j])]);
        return mpp.inverse().map_err(|_| Error::SingularBlock {
            context: "Schur complement (PMP block)",
        });
    }

    let mqq = CMatrix::from_fn(nq, |i, j| m[(q_indices[i], q_indices[j])]);
    let mqq_inv = mqq.inverse().map_err(|_| Error::SingularBlock {
        context: "Schur complement (QMQ block)",
    })?;

    // S = PMP - PMQ (QMQ)^{-1} QMP
    let mut s = CMatrix::from_fn(np, |i, j| m[(p_indices[i], p_indices[j])]);
    for i in 0..np {
        for j in 0..np {
            let mut acc = num_complex::Complex::new(T::zero(), T::zero());
            for a in 0..nq {
                for b in 0..nq {
                    acc += m[(p_indices[i], q_indices[a])]
                        * mqq_inv[(a, b)]
                        * m[(q_indices[b], p_indices[j])];
                }
            }
            s[(i, j)] -= acc;
        }
    }
    s.inverse().map_err(|_| Error::SingularBlock {
        context: "Schur complement (S block)",
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_case() {
        let m = CMatrix::<f64>::identity(4);
        let s = schur_block_inverse(&m, &[0, 1]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((s[(i, j)] - c(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn matches_dense_inverse_blocks() {
        // random invertible complex matrices, |P| = 1 and |P| = 2
        let mut stream = crate::rng::RngStream::new(8, 0);
        for trial in 0..20 {
            let n = 5 + trial % 4;
            let m = CMatrix::from_fn(n, |_, _| {
                c(
                    2.0 * stream.next_uniform() - 1.0,
                    2.0 * stream.next_uniform() - 1.0,
                )
            });
            let inv = match m.inverse() {
                Ok(v) => v,
                Err(_) => continue,
            };
            let p1 = [trial % n];
            let s1 = schur_block_inverse(&m, &p1).unwrap();
            assert!(
                (s1[(0, 0)] - inv[(p1[0], p1[0])]).norm() < 1e-10,
                "trial {trial}"
            );

            let p2 = [trial % n, (trial + 2) % n];
            if p2[0] != p2[1] {
                let s2 = schur_block_inverse(&m, &p2).unwrap();
                for i in 0..2 {
                    for j in 0..2 {
                        assert!(
                            (s2[(i, j)] - inv[(p2[i], p2[j])]).norm() < 1e-10,
                            "trial {trial} block ({i},{j})"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn singular_complement_is_reported() {
        // QMQ block identically zero
        let mut m = CMatrix::<f64>::zeros(3);
        m[(0, 0)] = c(1.0, 0.0);
        m[(0, 1)] = c(0.5, 0.0);
        m[(1, 0)] = c(0.5, 0.0);
        let err = schur_block_inverse(&m, &[0]).unwrap_err();
        assert!(matches!(err, Error::SingularBlock { .. }));
    }
}
