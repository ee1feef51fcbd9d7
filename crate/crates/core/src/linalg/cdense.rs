//! Small dense complex matrices: multiplication, Gauss–Jordan inversion with
//! partial pivoting, and the scaling-and-squaring matrix exponential. These
//! back the Schur-complement operation and the semigroup identity checks;
//! orders stay small (the banded kernels carry the large-n work).

use crate::error::{Error, Result};
use crate::scalar::{norm_sqr, CScalar, Scalar};
use num_complex::Complex;

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    a: Vec<CScalar<T>>,
}

impl<T: Scalar> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            a: vec![Complex::new(T::zero(), T::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> CScalar<T>) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_real(rows: &[Vec<T>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| Complex::new(rows[i][j], T::zero()))
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn mul(&self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.re == T::zero() && aik.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMatrix<T>) -> CMatrix<T> {
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(rhs.a.iter()) {
            *x += *y;
        }
        out
    }

    pub fn sub(&self, rhs: &CMatrix<T>) -> CMatrix<T> {
        let mut out = self.clone();
        for (x, y) in out.a.iter_mut().zip(rhs.a.iter()) {
            *x -= *y;
        }
        out
    }

    pub fn scale(&self, s: CScalar<T>) -> CMatrix<T> {
        let mut out = self.clone();
        for x in out.a.iter_mut() {
            *x *= s;
        }
        out
    }

    pub fn mul_vec(&self, x: &[CScalar<T>]) -> Vec<CScalar<T>> {
        let n = self.n;
        let mut y = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                acc += self[(i, j)] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix<T> {
        CMatrix::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    /// Max absolute column sum.
    pub fn one_norm(&self) -> T {
        let n = self.n;
        let mut best = T::zero();
        for j in 0..n {
            let mut s = T::zero();
            for i in 0..n {
                s += self[(i, j)].norm();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Max absolute entry.
    pub fn max_norm(&self) -> T {
        self.a
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |m, v| if v > m { v } else { m })
    }

    /// Spectral norm via power iteration on A*A (sufficient for the bound
    /// checks on small matrices).
    pub fn spectral_norm(&self) -> T {
        let n = self.n;
        if n == 0 {
            return T::zero();
        }
        let ata = self.adjoint().mul(self);
        let mut v: Vec<CScalar<T>> = (0..n)
            .map(|i| Complex::new(T::one() + T::of_usize(i % 3), T::of(0.25)))
            .collect();
        let mut lam = T::zero();
        for _ in 0..200 {
            let w = ata.mul_vec(&v);
            let norm = w.iter().map(|z| norm_sqr(*z)).sum::<T>().sqrt();
            if norm == T::zero() {
                return T::zero();
            }
            lam = norm;
            for (vi, wi) in v.iter_mut().zip(w.iter()) {
                *vi = *wi / norm;
            }
        }
        lam.sqrt()
    }

    /// Inverse by Gauss–Jordan with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix<T>> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        for col in 0..n {
            // pivot
            let mut best = col;
            let mut best_mag = norm_sqr(a[(col, col)]);
            for r in col + 1..n {
                let m = norm_sqr(a[(r, col)]);
                if m > best_mag {
                    best_mag = m;
                    best = r;
                }
            }
            if best_mag == T::zero() {
                return Err(Error::SingularBlock {
                    context: "dense complex inverse",
                });
            }
            if best != col {
                for j in 0..n {
                    a.a.swap(col * n + j, best * n + j);
                    inv.a.swap(col * n + j, best * n + j);
                }
            }
            let piv = a[(col, col)];
            let piv_inv = Complex::new(T::one(), T::zero()) / piv;
            for j in 0..n {
                a[(col, j)] *= piv_inv;
                inv[(col, j)] *= piv_inv;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[(r, col)];
                if f.re == T::zero() && f.im == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let ac = a[(col, j)];
                    let ic = inv[(col, j)];
                    a[(r, j)] -= f * ac;
                    inv[(r, j)] -= f * ic;
                }
            }
        }
        Ok(inv)
    }

    /// e^{A} by scaling-and-squaring with a Taylor kernel: scale so the
    /// 1-norm is below 1/4, sum until terms vanish at working precision,
    /// square back.
    pub fn expm(&self) -> CMatrix<T> {
        let n = self.n;
        let norm = self.one_norm();
        let mut squarings = 0u32;
        let mut scale = T::one();
        if norm > T::of(0.25) {
            let k = (norm.to_f64_lossy() * 4.0).log2().ceil().max(0.0) as u32;
            squarings = k;
            scale = T::of(0.5).powi(k as i32);
        }
        let x = self.scale(Complex::new(scale, T::zero()));
        let mut sum = CMatrix::identity(n);
        let mut term = CMatrix::identity(n);
        for m in 1..64u32 {
            term = term.mul(&x);
            let f = T::of_usize(m as usize).recip();
            term = term.scale(Complex::new(f, T::zero()));
            sum = sum.add(&term);
            if term.max_norm() < T::epsilon() * T::of(0.25) {
                break;
            }
        }
        let mut result = sum;
        for _ in 0..squarings {
            result = result.mul(&result);
        }
        result
    }
}

impl<T: Scalar> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = CScalar<T>;
    fn index(&self, (i, j): (usize, usize)) -> &CScalar<T> {
        &self.a[i * self.n + j]
    }
}

impl<T: Scalar> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CScalar<T> {
        &mut self.a[i * self.n + j]
    }
}
