//! Synthetic test scenes.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cube::HsiCube;
use crate::error::{usage_err, Result};
use crate::linalg::Matrix;
use crate::tensor::{Tensor3, TuckerFactors};

/// Random Tucker cube of multilinear rank `ranks = (r_rows, r_cols, r_bands)`,
/// min-max rescaled to `[0, 1]`.
///
/// Core and factor entries are i.i.d. standard normal.
pub fn low_rank_cube(rows: usize, cols: usize, bands: usize, ranks: [usize; 3], seed: u64) -> Result<HsiCube> {
    if ranks.contains(&0) || ranks[0] > rows || ranks[1] > cols || ranks[2] > bands {
        return Err(usage_err!("ranks {:?} must be positive and fit {rows}x{cols}x{bands}", ranks));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.sample(StandardNormal)).collect() };
    let core = Tensor3::from_vec(ranks, gauss(ranks[0] * ranks[1] * ranks[2]))?;
    let factors = [
        Matrix::from_vec(rows, ranks[0], gauss(rows * ranks[0]))?,
        Matrix::from_vec(cols, ranks[1], gauss(cols * ranks[1]))?,
        Matrix::from_vec(bands, ranks[2], gauss(bands * ranks[2]))?,
    ];
    let t = TuckerFactors { core, factors }.reconstruct()?;
    let cube = HsiCube::from_fn(rows, cols, bands, |i, j, b| t.get(i, j, b));
    Ok(rescale_unit(cube))
}

/// Piecewise-smooth scene: a few materials with smooth reflectance spectra
/// mixed by soft circular blobs over a gentle background gradient.
pub fn smooth_scene(rows: usize, cols: usize, bands: usize, seed: u64) -> HsiCube {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let materials = 4;
    let spectra: Vec<(f64, f64, f64)> = (0..materials)
        .map(|_| (rng.random_range(0.0..1.0), rng.random_range(0.15..0.5), rng.random_range(0.3..0.9)))
        .collect();
    let blobs: Vec<(f64, f64, f64, usize)> = (0..6)
        .map(|m| {
            (
                rng.random_range(0.0..rows as f64),
                rng.random_range(0.0..cols as f64),
                rng.random_range(0.15..0.35) * rows.min(cols) as f64,
                m % materials,
            )
        })
        .collect();
    let reflect = |m: usize, b: usize| {
        let (center, width, height) = spectra[m];
        let x = if bands > 1 { b as f64 / (bands - 1) as f64 } else { 0.5 };
        0.1 + height * libm::exp(-((x - center) * (x - center)) / (2.0 * width * width))
    };
    let cube = HsiCube::from_fn(rows, cols, bands, |i, j, b| {
        let base = 0.2 + 0.1 * (i as f64 / rows as f64) + 0.05 * (j as f64 / cols as f64);
        let mut v = base * reflect(0, b);
        for &(ci, cj, r, m) in &blobs {
            let d2 = ((i as f64 - ci) * (i as f64 - ci) + (j as f64 - cj) * (j as f64 - cj)) / (r * r);
            let a = 1.0 / (1.0 + libm::exp(8.0 * (d2 - 1.0)));
            v = (1.0 - a) * v + a * reflect(m, b);
        }
        v
    });
    cube.map(|v| v.clamp(0.0, 1.0))
}

/// Min-max rescales a cube into `[0, 1]` (constant cubes become zero).
pub fn rescale_unit(cube: HsiCube) -> HsiCube {
    let lo = cube.as_slice().iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cube.as_slice().iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    if !(span > 0.0) {
        return cube.map(|_| 0.0);
    }
    cube.map(|v| (v - lo) / span)
}
