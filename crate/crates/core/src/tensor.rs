//! Dense third-order tensors and their Tucker (HOSVD) decomposition.
//!
//! # Layout
//!
//! A [`Tensor3`] of dims `(d1, d2, d3)` stores entry `(i1, i2, i3)` at
//! `(i1 * d2 + i2) * d3 + i3`: mode 1 varies slowest, mode 3 fastest.
//!
//! # Unfolding
//!
//! The mode-`n` unfolding is a `d_n × (d_a · d_b)` matrix whose columns are
//! the mode-`n` fibers. The remaining modes are taken cyclically,
//! `(a, b) = (n+1, n+2)` wrapping past 3, and column `i_a * d_b + i_b`
//! holds the fiber at `(i_a, i_b)`. Concretely:
//!
//! | mode | column index      |
//! |------|-------------------|
//! | 1    | `i2 * d3 + i3`    |
//! | 2    | `i3 * d1 + i1`    |
//! | 3    | `i1 * d2 + i2`    |
//!
//! so the mode-1 unfolding is the raw buffer reshaped.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{data_err, dim_err, usage_err, Result};
use crate::linalg::{symmetric_eigen, Matrix};

/// Tensor mode selector (1-based, as in the mathematical notation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    One,
    Two,
    Three,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::One, Mode::Two, Mode::Three];

    /// Parses a 1-based mode number.
    pub fn from_index(n: usize) -> Result<Mode> {
        match n {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            3 => Ok(Mode::Three),
            _ => Err(usage_err!("tensor mode must be 1, 2 or 3, got {n}")),
        }
    }

    #[inline]
    fn axis(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
            Mode::Three => 2,
        }
    }
}

/// Dense real tensor of order three.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(d1: usize, d2: usize, d3: usize) -> Self {
        Self { dims: [d1, d2, d3], data: vec![0.0; d1 * d2 * d3] }
    }

    pub fn filled(d1: usize, d2: usize, d3: usize, value: f64) -> Self {
        Self { dims: [d1, d2, d3], data: vec![value; d1 * d2 * d3] }
    }

    pub fn from_vec(dims: [usize; 3], data: Vec<f64>) -> Result<Self> {
        let n = dims[0] * dims[1] * dims[2];
        if data.len() != n {
            return Err(dim_err!("tensor {:?} needs {n} entries, got {}", dims, data.len()));
        }
        Ok(Self { dims, data })
    }

    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dims[0] * dims[1] * dims[2]);
        for i in 0..dims[0] {
            for j in 0..dims[1] {
                for k in 0..dims[2] {
                    data.push(f(i, j, k));
                }
            }
        }
        Self { dims, data }
    }

    #[inline]
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dims[1] + j) * self.dims[2] + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.offset(i, j, k)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: f64) {
        let o = self.offset(i, j, k);
        self.data[o] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn frobenius_norm(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|x| x * x).sum())
    }

    /// Mode-`n` matricization; see the module docs for column ordering.
    pub fn unfold(&self, mode: Mode) -> Matrix {
        let [d1, d2, d3] = self.dims;
        match mode {
            Mode::One => Matrix::from_vec(d1, d2 * d3, self.data.clone()).expect("sizes agree"),
            Mode::Two => {
                let mut out = vec![0.0; self.data.len()];
                let cols = d3 * d1;
                for i1 in 0..d1 {
                    for i2 in 0..d2 {
                        for i3 in 0..d3 {
                            out[i2 * cols + i3 * d1 + i1] = self.get(i1, i2, i3);
                        }
                    }
                }
                Matrix::from_vec(d2, cols, out).expect("sizes agree")
            }
            Mode::Three => {
                let mut out = vec![0.0; self.data.len()];
                let cols = d1 * d2;
                for i1 in 0..d1 {
                    for i2 in 0..d2 {
                        for i3 in 0..d3 {
                            out[i3 * cols + i1 * d2 + i2] = self.get(i1, i2, i3);
                        }
                    }
                }
                Matrix::from_vec(d3, cols, out).expect("sizes agree")
            }
        }
    }

    /// Inverse of [`Tensor3::unfold`].
    pub fn fold(m: &Matrix, mode: Mode, dims: [usize; 3]) -> Result<Tensor3> {
        let [d1, d2, d3] = dims;
        let rows = dims[mode.axis()];
        let cols = d1 * d2 * d3 / rows.max(1);
        if m.rows() != rows || m.rows() * m.cols() != d1 * d2 * d3 || m.cols() != cols {
            return Err(dim_err!(
                "cannot fold a {}x{} matrix along mode {:?} into {:?}",
                m.rows(),
                m.cols(),
                mode,
                dims
            ));
        }
        let src = m.as_slice();
        let data = match mode {
            Mode::One => src.to_vec(),
            Mode::Two => {
                let mut out = vec![0.0; src.len()];
                for i1 in 0..d1 {
                    for i2 in 0..d2 {
                        for i3 in 0..d3 {
                            out[(i1 * d2 + i2) * d3 + i3] = src[i2 * cols + i3 * d1 + i1];
                        }
                    }
                }
                out
            }
            Mode::Three => {
                let mut out = vec![0.0; src.len()];
                for i1 in 0..d1 {
                    for i2 in 0..d2 {
                        for i3 in 0..d3 {
                            out[(i1 * d2 + i2) * d3 + i3] = src[i3 * cols + i1 * d2 + i2];
                        }
                    }
                }
                out
            }
        };
        Ok(Tensor3 { dims, data })
    }

    /// n-mode product `self ×_n a` with `a` of shape `J × d_n`.
    pub fn mode_product(&self, a: &Matrix, mode: Mode) -> Result<Tensor3> {
        let axis = mode.axis();
        if a.cols() != self.dims[axis] {
            return Err(dim_err!(
                "mode-{} product needs a matrix with {} columns, got {}x{}",
                axis + 1,
                self.dims[axis],
                a.rows(),
                a.cols()
            ));
        }
        let product = a.matmul(&self.unfold(mode))?;
        let mut dims = self.dims;
        dims[axis] = a.rows();
        Tensor3::fold(&product, mode, dims)
    }
}

/// Core tensor and per-mode factor matrices of a Tucker decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct TuckerFactors {
    pub core: Tensor3,
    /// `factors[n]` has shape `d_{n+1} × r_{n+1}` with orthonormal columns.
    pub factors: [Matrix; 3],
}

impl TuckerFactors {
    /// `core ×₁ U₁ ×₂ U₂ ×₃ U₃`, applied in mode order.
    pub fn reconstruct(&self) -> Result<Tensor3> {
        let mut t = self.core.clone();
        for (mode, u) in Mode::ALL.iter().zip(&self.factors) {
            t = t.mode_product(u, *mode)?;
        }
        Ok(t)
    }
}

/// Full higher-order SVD.
///
/// `U_n` holds the left singular vectors of the mode-`n` unfolding
/// (`r_n = min(d_n, ∏_{m≠n} d_m)`), obtained from the eigenvectors of the
/// unfolding's Gram matrix, and the core is `t ×₁ U₁ᵀ ×₂ U₂ᵀ ×₃ U₃ᵀ`.
pub fn hosvd(t: &Tensor3) -> Result<TuckerFactors> {
    if !t.is_finite() {
        return Err(data_err!("HOSVD input contains non-finite values"));
    }
    if t.dims.contains(&0) {
        return Err(dim_err!("HOSVD needs nonzero dims, got {:?}", t.dims));
    }
    let total = t.len();
    let mut factors: [Matrix; 3] = [Matrix::zeros(0, 0), Matrix::zeros(0, 0), Matrix::zeros(0, 0)];
    for mode in Mode::ALL {
        let d = t.dims[mode.axis()];
        let rank = d.min(total / d);
        let eig = symmetric_eigen(&t.unfold(mode).gram())?;
        factors[mode.axis()] = eig.vectors.leading_columns(rank);
    }
    let mut core = t.clone();
    for mode in Mode::ALL {
        core = core.mode_product(&factors[mode.axis()].transpose(), mode)?;
    }
    Ok(TuckerFactors { core, factors })
}
