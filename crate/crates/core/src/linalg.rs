//! Small dense matrices and a symmetric eigensolver.
//!
//! Everything here is sized for group tensors (tens of rows), so the
//! routines favour simplicity and bitwise reproducibility over blocking.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{dim_err, Result};

/// Dense real matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_err!(
                "matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            ));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from a function of `(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(dim_err!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.cols,
                other.rows,
                other.cols
            ));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · selfᵀ`, exploiting symmetry.
    pub fn gram(&self) -> Matrix {
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            let ri = &self.data[i * self.cols..(i + 1) * self.cols];
            for j in i..n {
                let rj = &self.data[j * self.cols..(j + 1) * self.cols];
                let s: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
                out.data[i * n + j] = s;
                out.data[j * n + i] = s;
            }
        }
        out
    }

    /// Returns the matrix made of the first `k` columns.
    pub fn leading_columns(&self, k: usize) -> Matrix {
        Matrix::from_fn(self.rows, k.min(self.cols), |r, c| self.get(r, c))
    }

    /// Largest absolute entry of `selfᵀ·self − I`.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.cols {
            for b in a..self.cols {
                let dot: f64 = (0..self.rows).map(|r| self.get(r, a) * self.get(r, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max(libm::fabs(dot - target));
            }
        }
        worst
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in non-increasing order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one per column, matching `values`.
    pub vectors: Matrix,
}

/// Cyclic Jacobi eigensolver for a symmetric matrix.
///
/// Only the upper triangle is read. Eigenvectors come back sorted by
/// descending eigenvalue (stable on ties) and sign-normalized so that each
/// column's largest-magnitude entry (first one on ties) is nonnegative.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(dim_err!("eigen-decomposition needs a square matrix, got {}x{}", a.rows(), a.cols()));
    }
    let mut m = Matrix::from_fn(n, n, |r, c| if r <= c { a.get(r, c) } else { a.get(c, r) });
    let mut v = Matrix::identity(n);

    let total: f64 = m.data.iter().map(|x| x * x).sum();
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q) * m.get(p, q);
            }
        }
        if off <= f64::MIN_POSITIVE || off <= 1e-34 * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(1.0 + theta * theta))
                } else {
                    -1.0 / (-theta + libm::sqrt(1.0 + theta * theta))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = t * c;
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m.get(y, y).total_cmp(&m.get(x, x)));
    let values = order.iter().map(|&i| m.get(i, i)).collect();
    let mut vectors = Matrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    normalize_signs(&mut vectors);
    Ok(SymmetricEigen { values, vectors })
}

/// Flips columns so their largest-magnitude entry is nonnegative.
pub(crate) fn normalize_signs(m: &mut Matrix) {
    for c in 0..m.cols() {
        let mut best = 0usize;
        let mut best_abs = -1.0;
        for r in 0..m.rows() {
            let a = libm::fabs(m.get(r, c));
            if a > best_abs {
                best_abs = a;
                best = r;
            }
        }
        if m.rows() > 0 && m.get(best, c) < 0.0 {
            for r in 0..m.rows() {
                let x = m.get(r, c);
                m.set(r, c, -x);
            }
        }
    }
}
