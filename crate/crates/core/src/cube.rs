//! Hyperspectral cubes and 2D planes.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{dim_err, Result};

/// Hyperspectral image of `rows × cols × bands`.
///
/// Stored band-major: voxel `(i, j, λ)` lives at `(λ * rows + i) * cols + j`,
/// so each band is a contiguous row-major image.
#[derive(Debug, Clone, PartialEq)]
pub struct HsiCube {
    rows: usize,
    cols: usize,
    bands: usize,
    data: Vec<f64>,
}

impl HsiCube {
    pub fn zeros(rows: usize, cols: usize, bands: usize) -> Self {
        Self { rows, cols, bands, data: vec![0.0; rows * cols * bands] }
    }

    pub fn filled(rows: usize, cols: usize, bands: usize, value: f64) -> Self {
        Self { rows, cols, bands, data: vec![value; rows * cols * bands] }
    }

    pub fn from_vec(rows: usize, cols: usize, bands: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols * bands {
            return Err(dim_err!(
                "cube {rows}x{cols}x{bands} needs {} values, got {}",
                rows * cols * bands,
                data.len()
            ));
        }
        Ok(Self { rows, cols, bands, data })
    }

    pub fn from_fn(rows: usize, cols: usize, bands: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols * bands);
        for b in 0..bands {
            for i in 0..rows {
                for j in 0..cols {
                    data.push(f(i, j, b));
                }
            }
        }
        Self { rows, cols, bands, data }
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
    pub fn bands(&self) -> usize {
        self.bands
    }

    /// `(rows, cols, bands)`.
    #[inline]
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.rows, self.cols, self.bands)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, band: usize) -> usize {
        (band * self.rows + i) * self.cols + j
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, band: usize) -> f64 {
        self.data[self.index(i, j, band)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, band: usize, v: f64) {
        let o = self.index(i, j, band);
        self.data[o] = v;
    }

    pub fn band(&self, band: usize) -> &[f64] {
        let n = self.rows * self.cols;
        &self.data[band * n..(band + 1) * n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn same_dims(&self, other: &HsiCube) -> bool {
        self.dims() == other.dims()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(dot(&self.data, &self.data))
    }

    pub fn dot(&self, other: &HsiCube) -> f64 {
        dot(&self.data, &other.data)
    }

    /// Clamps every voxel into `[lo, hi]`.
    pub fn clamp(&mut self, lo: f64, hi: f64) {
        for x in &mut self.data {
            *x = x.clamp(lo, hi);
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> HsiCube {
        HsiCube { data: self.data.iter().map(|&x| f(x)).collect(), ..*self }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &HsiCube, b: f64) -> Result<HsiCube> {
        if !self.same_dims(other) {
            return Err(dim_err!("cube dims {:?} vs {:?}", self.dims(), other.dims()));
        }
        Ok(HsiCube {
            data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect(),
            ..*self
        })
    }
}

/// Dense 2D plane (measurement, mask), row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Plane {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(dim_err!("plane {rows}x{cols} needs {} values, got {}", rows * cols, data.len()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
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
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
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

    pub fn dot(&self, other: &Plane) -> f64 {
        dot(&self.data, &other.data)
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(dot(&self.data, &self.data))
    }
}

/// Sequential dot product; the fixed accumulation order keeps results bitwise reproducible.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_major_layout() {
        let c = HsiCube::from_fn(2, 3, 2, |i, j, b| (100 * b + 10 * i + j) as f64);
        assert_eq!(c.band(1), &[100.0, 101.0, 102.0, 110.0, 111.0, 112.0]);
        assert_eq!(c.index(1, 2, 1), 11);
    }

    #[test]
    fn wrong_length_rejected() {
        assert!(HsiCube::from_vec(2, 2, 2, vec![0.0; 7]).is_err());
        assert!(Plane::from_vec(2, 2, vec![0.0; 3]).is_err());
    }
}
