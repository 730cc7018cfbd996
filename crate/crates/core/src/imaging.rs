//! Observation models of the coded-aperture snapshot imager (CASSI) and
//! its dual-camera variant (CASSI plus a panchromatic camera).
//!
//! With mask `m`, dispersion offsets `δ(λ)` and spectral response `ρ(λ)`,
//! the CASSI detector records
//!
//! ```text
//! y_c(i, j) = Σ_λ ρ_c(λ) · m(i − δ(λ), j) · f(i − δ(λ), j, λ)
//! ```
//!
//! on a `(rows + max δ) × cols` plane, and the panchromatic detector records
//! `y_p(i, j) = Σ_λ ρ_p(λ) · f(i, j, λ)`. Both are noiseless; a beam-splitter
//! energy factor, if any, belongs in the response vectors.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::cube::{HsiCube, Plane};
use crate::error::{dim_err, usage_err, Result};

/// Which detectors the system carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemMode {
    /// CASSI branch only.
    Cassi,
    /// CASSI branch plus an uncoded panchromatic camera.
    DualCamera,
}

/// Coded aperture, dispersion and spectral response of a snapshot imager.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    mask: Plane,
    dispersion: Vec<usize>,
    response: Vec<f64>,
    pan_response: Vec<f64>,
    mode: SystemMode,
}

impl SystemModel {
    /// Builds a model with unit response and the default one-pixel-per-band dispersion.
    pub fn new(mask: Plane, bands: usize, mode: SystemMode) -> Result<Self> {
        Self::with_parts(mask, linear_dispersion(bands, 1), vec![1.0; bands], vec![1.0; bands], mode)
    }

    pub fn with_parts(
        mask: Plane,
        dispersion: Vec<usize>,
        response: Vec<f64>,
        pan_response: Vec<f64>,
        mode: SystemMode,
    ) -> Result<Self> {
        let bands = dispersion.len();
        if bands == 0 {
            return Err(usage_err!("system needs at least one band"));
        }
        if response.len() != bands || pan_response.len() != bands {
            return Err(dim_err!(
                "{} dispersion offsets but {} CASSI and {} panchromatic responses",
                bands,
                response.len(),
                pan_response.len()
            ));
        }
        if mask.as_slice().iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(usage_err!("mask entries must be 0 or 1"));
        }
        if dispersion.windows(2).any(|w| w[1] < w[0]) {
            return Err(usage_err!("dispersion offsets must be nondecreasing"));
        }
        if response.iter().chain(&pan_response).any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(usage_err!("spectral responses must be positive and finite"));
        }
        Ok(Self { mask, dispersion, response, pan_response, mode })
    }

    pub fn mask(&self) -> &Plane {
        &self.mask
    }

    pub fn dispersion(&self) -> &[usize] {
        &self.dispersion
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn pan_response(&self) -> &[f64] {
        &self.pan_response
    }

    pub fn mode(&self) -> SystemMode {
        self.mode
    }

    /// Same optics with a different detector configuration.
    pub fn with_mode(&self, mode: SystemMode) -> SystemModel {
        SystemModel { mode, ..self.clone() }
    }

    pub fn rows(&self) -> usize {
        self.mask.rows()
    }

    pub fn cols(&self) -> usize {
        self.mask.cols()
    }

    pub fn bands(&self) -> usize {
        self.dispersion.len()
    }

    /// Height of the CASSI detector, `rows + max δ`.
    pub fn measurement_rows(&self) -> usize {
        self.rows() + self.dispersion.last().copied().unwrap_or(0)
    }

    fn check_cube(&self, f: &HsiCube) -> Result<()> {
        if f.dims() != (self.rows(), self.cols(), self.bands()) {
            return Err(dim_err!(
                "cube is {:?} but the system expects {:?}",
                f.dims(),
                (self.rows(), self.cols(), self.bands())
            ));
        }
        Ok(())
    }

    fn check_measurement(&self, y: &Measurement) -> Result<()> {
        if y.cassi.dims() != (self.measurement_rows(), self.cols()) {
            return Err(dim_err!(
                "CASSI plane is {:?} but the system expects {:?}",
                y.cassi.dims(),
                (self.measurement_rows(), self.cols())
            ));
        }
        match (&y.pan, self.mode) {
            (Some(p), SystemMode::DualCamera) if p.dims() != (self.rows(), self.cols()) => Err(dim_err!(
                "panchromatic plane is {:?} but the system expects {:?}",
                p.dims(),
                (self.rows(), self.cols())
            )),
            (None, SystemMode::DualCamera) => Err(dim_err!("dual-camera system needs a panchromatic plane")),
            (Some(_), SystemMode::Cassi) => Err(dim_err!("CASSI-only system got a panchromatic plane")),
            _ => Ok(()),
        }
    }
}

/// `δ(λ) = step · λ` for zero-based band index λ.
pub fn linear_dispersion(bands: usize, step: usize) -> Vec<usize> {
    (0..bands).map(|b| b * step).collect()
}

/// Snapshot measurement: the CASSI plane and, for dual-camera systems, the panchromatic plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub cassi: Plane,
    pub pan: Option<Plane>,
}

impl Measurement {
    pub fn zeros(sys: &SystemModel) -> Self {
        Measurement {
            cassi: Plane::zeros(sys.measurement_rows(), sys.cols()),
            pan: match sys.mode() {
                SystemMode::Cassi => None,
                SystemMode::DualCamera => Some(Plane::zeros(sys.rows(), sys.cols())),
            },
        }
    }

    /// Inner product over both planes.
    pub fn dot(&self, other: &Measurement) -> f64 {
        let pan = match (&self.pan, &other.pan) {
            (Some(a), Some(b)) => a.dot(b),
            _ => 0.0,
        };
        self.cassi.dot(&other.cassi) + pan
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    /// `self − other`, planewise.
    pub fn sub(&self, other: &Measurement) -> Result<Measurement> {
        fn diff(a: &Plane, b: &Plane) -> Result<Plane> {
            if a.dims() != b.dims() {
                return Err(dim_err!("plane dims {:?} vs {:?}", a.dims(), b.dims()));
            }
            Plane::from_vec(a.rows(), a.cols(), a.as_slice().iter().zip(b.as_slice()).map(|(x, y)| x - y).collect())
        }
        let pan = match (&self.pan, &other.pan) {
            (Some(a), Some(b)) => Some(diff(a, b)?),
            (None, None) => None,
            _ => return Err(dim_err!("measurements disagree on the panchromatic plane")),
        };
        Ok(Measurement { cassi: diff(&self.cassi, &other.cassi)?, pan })
    }
}

/// i.i.d. Bernoulli(`p`) binary mask from a seeded ChaCha8 stream.
pub fn generate_mask(rows: usize, cols: usize, p: f64, seed: u64) -> Result<Plane> {
    if !(0.0..=1.0).contains(&p) {
        return Err(usage_err!("mask probability must lie in [0, 1], got {p}"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(Plane::from_fn(rows, cols, |_, _| if rng.random_bool(p) { 1.0 } else { 0.0 }))
}

/// Adds zero-mean Gaussian noise of standard deviation `sigma` in place.
pub fn add_gaussian_noise(plane: &mut Plane, sigma: f64, seed: u64) -> Result<()> {
    if !(sigma >= 0.0) {
        return Err(usage_err!("noise sigma must be finite and nonnegative, got {sigma}"));
    }
    let normal = Normal::new(0.0, sigma).map_err(|_| usage_err!("noise sigma must be finite and nonnegative, got {sigma}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for v in plane.as_mut_slice() {
        *v += normal.sample(&mut rng);
    }
    Ok(())
}

pub fn cassi_forward(f: &HsiCube, sys: &SystemModel) -> Result<Plane> {
    sys.check_cube(f)?;
    let mut y = Plane::zeros(sys.measurement_rows(), sys.cols());
    cassi_forward_into(f, sys, &mut y);
    Ok(y)
}

fn cassi_forward_into(f: &HsiCube, sys: &SystemModel, y: &mut Plane) {
    let (rows, cols) = (sys.rows(), sys.cols());
    let mask = sys.mask.as_slice();
    let out = y.as_mut_slice();
    out.fill(0.0);
    for (band, (&shift, &rho)) in sys.dispersion.iter().zip(&sys.response).enumerate() {
        let src = f.band(band);
        for i in 0..rows {
            let dst = &mut out[(i + shift) * cols..(i + shift + 1) * cols];
            let m = &mask[i * cols..(i + 1) * cols];
            let s = &src[i * cols..(i + 1) * cols];
            for j in 0..cols {
                dst[j] += rho * m[j] * s[j];
            }
        }
    }
}

pub fn pan_forward(f: &HsiCube, sys: &SystemModel) -> Result<Plane> {
    if sys.mode != SystemMode::DualCamera {
        return Err(usage_err!("panchromatic forward model needs a dual-camera system"));
    }
    sys.check_cube(f)?;
    let mut y = Plane::zeros(sys.rows(), sys.cols());
    pan_forward_into(f, sys, &mut y);
    Ok(y)
}

fn pan_forward_into(f: &HsiCube, sys: &SystemModel, y: &mut Plane) {
    let out = y.as_mut_slice();
    out.fill(0.0);
    for (band, &rho) in sys.pan_response.iter().enumerate() {
        for (o, &v) in out.iter_mut().zip(f.band(band)) {
            *o += rho * v;
        }
    }
}

/// Full forward model: CASSI plane, plus the panchromatic plane for dual-camera systems.
pub fn forward(f: &HsiCube, sys: &SystemModel) -> Result<Measurement> {
    let cassi = cassi_forward(f, sys)?;
    let pan = match sys.mode {
        SystemMode::Cassi => None,
        SystemMode::DualCamera => Some(pan_forward(f, sys)?),
    };
    Ok(Measurement { cassi, pan })
}

/// Exact adjoint of [`forward`].
pub fn adjoint(y: &Measurement, sys: &SystemModel) -> Result<HsiCube> {
    sys.check_measurement(y)?;
    let mut f = HsiCube::zeros(sys.rows(), sys.cols(), sys.bands());
    adjoint_into(&y.cassi, y.pan.as_ref(), sys, &mut f);
    Ok(f)
}

fn adjoint_into(cassi: &Plane, pan: Option<&Plane>, sys: &SystemModel, f: &mut HsiCube) {
    let (rows, cols) = (sys.rows(), sys.cols());
    let n = rows * cols;
    let mask = sys.mask.as_slice();
    let yc = cassi.as_slice();
    let out = f.as_mut_slice();
    for (band, (&shift, &rho)) in sys.dispersion.iter().zip(&sys.response).enumerate() {
        let dst_band = &mut out[band * n..(band + 1) * n];
        for i in 0..rows {
            let src = &yc[(i + shift) * cols..(i + shift + 1) * cols];
            let m = &mask[i * cols..(i + 1) * cols];
            let dst = &mut dst_band[i * cols..(i + 1) * cols];
            for j in 0..cols {
                dst[j] = rho * m[j] * src[j];
            }
        }
        if let Some(p) = pan {
            let rho_p = sys.pan_response[band];
            for (d, &v) in dst_band.iter_mut().zip(p.as_slice()) {
                *d += rho_p * v;
            }
        }
    }
}

/// Reusable scratch space for repeated normal-operator applications.
#[derive(Debug, Clone)]
pub struct NormalOperator<'a> {
    sys: &'a SystemModel,
    cassi: Plane,
    pan: Option<Plane>,
}

impl<'a> NormalOperator<'a> {
    pub fn new(sys: &'a SystemModel) -> Self {
        let pan = match sys.mode {
            SystemMode::Cassi => None,
            SystemMode::DualCamera => Some(Plane::zeros(sys.rows(), sys.cols())),
        };
        Self { sys, cassi: Plane::zeros(sys.measurement_rows(), sys.cols()), pan }
    }

    /// Writes `ΦᵀΦ f` into `out`.
    pub fn apply_into(&mut self, f: &HsiCube, out: &mut HsiCube) -> Result<()> {
        self.sys.check_cube(f)?;
        self.sys.check_cube(out)?;
        cassi_forward_into(f, self.sys, &mut self.cassi);
        if let Some(p) = self.pan.as_mut() {
            pan_forward_into(f, self.sys, p);
        }
        adjoint_into(&self.cassi, self.pan.as_ref(), self.sys, out);
        Ok(())
    }
}

/// `ΦᵀΦ f` without building a [`Measurement`].
pub fn apply_normal_operator(f: &HsiCube, sys: &SystemModel) -> Result<HsiCube> {
    let mut out = HsiCube::zeros(sys.rows(), sys.cols(), sys.bands());
    NormalOperator::new(sys).apply_into(f, &mut out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones_system(rows: usize, cols: usize, bands: usize, mode: SystemMode) -> SystemModel {
        SystemModel::new(Plane::filled(rows, cols, 1.0), bands, mode).unwrap()
    }

    #[test]
    fn mask_extremes() {
        assert!(generate_mask(7, 5, 0.0, 3).unwrap().as_slice().iter().all(|&v| v == 0.0));
        assert!(generate_mask(7, 5, 1.0, 3).unwrap().as_slice().iter().all(|&v| v == 1.0));
        assert!(matches!(generate_mask(2, 2, 1.5, 0), Err(crate::Error::Usage(_))));
        assert!(generate_mask(2, 2, -0.1, 0).is_err());
    }

    #[test]
    fn mask_is_seeded() {
        assert_eq!(generate_mask(16, 16, 0.5, 9).unwrap(), generate_mask(16, 16, 0.5, 9).unwrap());
        assert_ne!(generate_mask(16, 16, 0.5, 9).unwrap(), generate_mask(16, 16, 0.5, 10).unwrap());
    }

    #[test]
    fn mask_density_concentrates() {
        for seed in [0u64, 1, 42, 1234] {
            let m = generate_mask(256, 256, 0.5, seed).unwrap();
            let mean = m.as_slice().iter().sum::<f64>() / (256.0 * 256.0);
            assert!((0.47..=0.53).contains(&mean), "seed {seed}: mean {mean}");
        }
    }

    #[test]
    fn single_band_passes_through() {
        let sys = ones_system(3, 4, 1, SystemMode::Cassi);
        let f = HsiCube::from_fn(3, 4, 1, |i, j, _| (i * 4 + j) as f64 * 0.1);
        let y = cassi_forward(&f, &sys).unwrap();
        assert_eq!(y.as_slice(), f.as_slice());
        let back = adjoint(&Measurement { cassi: y, pan: None }, &sys).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn single_voxel_lands_on_dispersed_row() {
        let sys = ones_system(5, 4, 3, SystemMode::Cassi);
        let mut f = HsiCube::zeros(5, 4, 3);
        f.set(2, 1, 2, 1.0);
        let y = cassi_forward(&f, &sys).unwrap();
        assert_eq!(y.dims(), (7, 4));
        for i in 0..7 {
            for j in 0..4 {
                let expect = if (i, j) == (4, 1) { 1.0 } else { 0.0 };
                assert_eq!(y.get(i, j), expect);
            }
        }
    }

    #[test]
    fn measurement_shape_at_full_scale() {
        let sys = ones_system(256, 256, 31, SystemMode::Cassi);
        assert_eq!(sys.measurement_rows(), 286);
    }

    #[test]
    fn pan_examples() {
        let sys = ones_system(3, 3, 2, SystemMode::DualCamera);
        let y = pan_forward(&HsiCube::filled(3, 3, 2, 0.5), &sys).unwrap();
        assert!(y.as_slice().iter().all(|&v| v == 1.0));
        let z = pan_forward(&HsiCube::zeros(3, 3, 2), &sys).unwrap();
        assert!(z.as_slice().iter().all(|&v| v == 0.0));
        let cassi = ones_system(3, 3, 2, SystemMode::Cassi);
        assert!(matches!(pan_forward(&HsiCube::zeros(3, 3, 2), &cassi), Err(crate::Error::Usage(_))));
    }

    #[test]
    fn weighted_pan_matches_direct_sum() {
        let rho = vec![0.2, 0.5, 0.3];
        let sys = SystemModel::with_parts(
            Plane::filled(4, 4, 1.0),
            linear_dispersion(3, 1),
            vec![1.0; 3],
            rho.clone(),
            SystemMode::DualCamera,
        )
        .unwrap();
        let f = HsiCube::from_fn(4, 4, 3, |i, j, b| libm::sin((i * 13 + j * 5 + b * 7) as f64));
        let y = pan_forward(&f, &sys).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let direct = rho[0] * f.get(i, j, 0) + rho[1] * f.get(i, j, 1) + rho[2] * f.get(i, j, 2);
                assert!((y.get(i, j) - direct).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn mode_controls_pan_plane() {
        let f = HsiCube::filled(4, 4, 2, 0.3);
        assert!(forward(&f, &ones_system(4, 4, 2, SystemMode::DualCamera)).unwrap().pan.is_some());
        assert!(forward(&f, &ones_system(4, 4, 2, SystemMode::Cassi)).unwrap().pan.is_none());
    }

    #[test]
    fn zero_measurement_adjoint() {
        let sys = ones_system(4, 3, 2, SystemMode::DualCamera);
        let f = adjoint(&Measurement::zeros(&sys), &sys).unwrap();
        assert!(f.as_slice().iter().all(|&v| v == 0.0));
        assert_eq!(apply_normal_operator(&HsiCube::zeros(4, 3, 2), &sys).unwrap(), HsiCube::zeros(4, 3, 2));
    }

    #[test]
    fn dimension_errors() {
        let sys = ones_system(4, 3, 2, SystemMode::Cassi);
        assert!(matches!(cassi_forward(&HsiCube::zeros(4, 4, 2), &sys), Err(crate::Error::Dimension(_))));
        let bad = Measurement { cassi: Plane::zeros(4, 3), pan: None };
        assert!(matches!(adjoint(&bad, &sys), Err(crate::Error::Dimension(_))));
    }

    #[test]
    fn invalid_system_parts() {
        let mask = Plane::filled(2, 2, 1.0);
        assert!(SystemModel::with_parts(mask.clone(), vec![1, 0], vec![1.0; 2], vec![1.0; 2], SystemMode::Cassi).is_err());
        assert!(SystemModel::with_parts(mask.clone(), vec![0, 1], vec![0.0, 1.0], vec![1.0; 2], SystemMode::Cassi).is_err());
        assert!(SystemModel::with_parts(Plane::filled(2, 2, 0.5), vec![0, 1], vec![1.0; 2], vec![1.0; 2], SystemMode::Cassi).is_err());
    }

    #[test]
    fn noise_is_seeded() {
        let mut a = Plane::zeros(8, 8);
        let mut b = Plane::zeros(8, 8);
        add_gaussian_noise(&mut a, 0.1, 5).unwrap();
        add_gaussian_noise(&mut b, 0.1, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.norm() > 0.0);
        assert!(add_gaussian_noise(&mut a, -1.0, 5).is_err());
    }
}
