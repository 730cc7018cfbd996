//! Reconstruction quality indexes: PSNR, SSIM, RMSE and ERGAS.
//!
//! Cubes are assumed normalized to `[0, 1]`, so PSNR uses a peak of 1 and
//! SSIM a dynamic range of 1. ERGAS uses a resolution ratio of 1 unless
//! told otherwise.

use alloc::vec::Vec;

use crate::cube::HsiCube;
use crate::error::{data_err, dim_err, usage_err, Result};

/// PSNR reported for identical inputs.
pub const PSNR_CAP_DB: f64 = 100.0;

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    /// Whole-cube PSNR in dB.
    pub psnr: f64,
    /// Mean of the per-band PSNRs in dB.
    pub psnr_band_mean: f64,
    pub ssim: f64,
    pub ergas: f64,
    pub rmse: f64,
    pub band_psnr: Vec<f64>,
}

impl QualityReport {
    pub fn compute(reference: &HsiCube, estimate: &HsiCube) -> Result<Self> {
        let band_psnr = band_psnr(reference, estimate)?;
        Ok(Self {
            psnr: psnr(reference, estimate)?,
            psnr_band_mean: band_psnr.iter().sum::<f64>() / band_psnr.len() as f64,
            ssim: ssim(reference, estimate)?,
            ergas: ergas(reference, estimate, 1.0)?,
            rmse: rmse(reference, estimate)?,
            band_psnr,
        })
    }
}

fn check(a: &HsiCube, b: &HsiCube) -> Result<()> {
    if !a.same_dims(b) {
        return Err(dim_err!("reference is {:?} but estimate is {:?}", a.dims(), b.dims()));
    }
    if a.as_slice().is_empty() {
        return Err(usage_err!("cannot score an empty cube"));
    }
    Ok(())
}

fn squared_error(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        PSNR_CAP_DB
    } else {
        (10.0 * libm::log10(1.0 / mse)).min(PSNR_CAP_DB)
    }
}

/// Whole-cube PSNR with unit peak.
pub fn psnr(reference: &HsiCube, estimate: &HsiCube) -> Result<f64> {
    check(reference, estimate)?;
    let n = reference.as_slice().len() as f64;
    Ok(psnr_from_mse(squared_error(reference.as_slice(), estimate.as_slice()) / n))
}

/// PSNR of each band.
pub fn band_psnr(reference: &HsiCube, estimate: &HsiCube) -> Result<Vec<f64>> {
    check(reference, estimate)?;
    let n = (reference.rows() * reference.cols()) as f64;
    Ok((0..reference.bands())
        .map(|b| psnr_from_mse(squared_error(reference.band(b), estimate.band(b)) / n))
        .collect())
}

/// Mean of [`band_psnr`].
pub fn psnr_band_mean(reference: &HsiCube, estimate: &HsiCube) -> Result<f64> {
    let v = band_psnr(reference, estimate)?;
    Ok(v.iter().sum::<f64>() / v.len() as f64)
}

pub fn rmse(reference: &HsiCube, estimate: &HsiCube) -> Result<f64> {
    check(reference, estimate)?;
    let n = reference.as_slice().len() as f64;
    Ok(libm::sqrt(squared_error(reference.as_slice(), estimate.as_slice()) / n))
}

/// `100 · ratio · sqrt(mean_λ (RMSE_λ / mean_λ(ref))²)`.
pub fn ergas(reference: &HsiCube, estimate: &HsiCube, ratio: f64) -> Result<f64> {
    check(reference, estimate)?;
    let n = (reference.rows() * reference.cols()) as f64;
    let mut acc = 0.0;
    for b in 0..reference.bands() {
        let mean = reference.band(b).iter().sum::<f64>() / n;
        if mean == 0.0 {
            return Err(data_err!("reference band {b} has zero mean"));
        }
        let band_rmse = libm::sqrt(squared_error(reference.band(b), estimate.band(b)) / n);
        acc += (band_rmse / mean) * (band_rmse / mean);
    }
    Ok(100.0 * ratio * libm::sqrt(acc / reference.bands() as f64))
}

/// Normalized 1D Gaussian taps; the 2D window is their outer product.
pub fn gaussian_taps(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let raw: Vec<f64> = (0..size).map(|i| libm::exp(-((i as f64 - c) * (i as f64 - c)) / (2.0 * sigma * sigma))).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Separable "valid" filtering of a `rows × cols` image.
fn filter_valid(img: &[f64], rows: usize, cols: usize, taps: &[f64]) -> Vec<f64> {
    let w = taps.len();
    let (orows, ocols) = (rows - w + 1, cols - w + 1);
    let mut horiz = alloc::vec![0.0; rows * ocols];
    for i in 0..rows {
        for j in 0..ocols {
            horiz[i * ocols + j] = taps.iter().zip(&img[i * cols + j..]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = alloc::vec![0.0; orows * ocols];
    for i in 0..orows {
        for j in 0..ocols {
            out[i * ocols + j] = taps.iter().enumerate().map(|(k, t)| t * horiz[(i + k) * ocols + j]).sum();
        }
    }
    out
}

/// Mean SSIM of one band.
pub fn ssim_band(x: &[f64], y: &[f64], rows: usize, cols: usize) -> Result<f64> {
    if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        return Err(usage_err!("SSIM needs bands of at least {SSIM_WINDOW}x{SSIM_WINDOW}, got {rows}x{cols}"));
    }
    let taps = gaussian_taps(SSIM_WINDOW, SSIM_SIGMA);
    let prod = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p * q).collect() };
    let mu_x = filter_valid(x, rows, cols, &taps);
    let mu_y = filter_valid(y, rows, cols, &taps);
    let xx = filter_valid(&prod(x, x), rows, cols, &taps);
    let yy = filter_valid(&prod(y, y), rows, cols, &taps);
    let xy = filter_valid(&prod(x, y), rows, cols, &taps);
    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut total = 0.0;
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let vx = xx[i] - mx * mx;
        let vy = yy[i] - my * my;
        let cxy = xy[i] - mx * my;
        total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    Ok(total / mu_x.len() as f64)
}

/// Band-averaged single-scale SSIM.
pub fn ssim(reference: &HsiCube, estimate: &HsiCube) -> Result<f64> {
    check(reference, estimate)?;
    let (rows, cols, bands) = reference.dims();
    let mut total = 0.0;
    for b in 0..bands {
        total += ssim_band(reference.band(b), estimate.band(b), rows, cols)?;
    }
    Ok(total / bands as f64)
}
