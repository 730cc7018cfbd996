//! Conjugate gradient for the image update
//! `(ΦᵀΦ + 2τ·diag(counts)) f = rhs`.

use alloc::vec::Vec;

use crate::cube::HsiCube;
use crate::error::{data_err, dim_err, usage_err, Result};
use crate::imaging::{NormalOperator, SystemModel};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgParams {
    pub max_iter: usize,
    /// Stop once `‖A f − rhs‖ / ‖rhs‖` drops to this value.
    pub tol: f64,
}

impl Default for CgParams {
    fn default() -> Self {
        Self { max_iter: 50, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
    /// Relative residual before the first step and after each step.
    pub history: Vec<f64>,
}

/// The SPD operator `f ↦ ΦᵀΦ f + 2τ·counts ⊙ f`.
pub struct ImageOperator<'a> {
    normal: NormalOperator<'a>,
    diag: Vec<f64>,
}

impl<'a> ImageOperator<'a> {
    pub fn new(sys: &'a SystemModel, counts: &HsiCube, tau: f64) -> Result<Self> {
        if counts.dims() != (sys.rows(), sys.cols(), sys.bands()) {
            return Err(dim_err!("counts are {:?}, system is {:?}", counts.dims(), (sys.rows(), sys.cols(), sys.bands())));
        }
        if !(tau > 0.0) {
            return Err(usage_err!("penalty tau must be positive, got {tau}"));
        }
        if counts.as_slice().iter().any(|&c| !(c >= 0.0)) {
            return Err(data_err!("aggregation counts must be nonnegative"));
        }
        let diag = counts.as_slice().iter().map(|&c| 2.0 * tau * c).collect();
        Ok(Self { normal: NormalOperator::new(sys), diag })
    }

    pub fn apply_into(&mut self, f: &HsiCube, out: &mut HsiCube) -> Result<()> {
        self.normal.apply_into(f, out)?;
        for ((o, &d), &x) in out.as_mut_slice().iter_mut().zip(&self.diag).zip(f.as_slice()) {
            *o += d * x;
        }
        Ok(())
    }
}

/// Solves the image update by conjugate gradients from the initial guess `x0`
/// (zero when `None`). Non-convergence is reported, not treated as an error.
pub fn cg_solve_image(
    rhs: &HsiCube,
    counts: &HsiCube,
    sys: &SystemModel,
    tau: f64,
    x0: Option<&HsiCube>,
    params: &CgParams,
) -> Result<(HsiCube, CgReport)> {
    if !rhs.is_finite() {
        return Err(data_err!("right-hand side contains non-finite values"));
    }
    if !counts.same_dims(rhs) {
        return Err(dim_err!("rhs is {:?}, counts are {:?}", rhs.dims(), counts.dims()));
    }
    let mut op = ImageOperator::new(sys, counts, tau)?;
    let (rows, cols, bands) = rhs.dims();
    let b_norm = rhs.norm();
    if b_norm == 0.0 {
        let report = CgReport { iterations: 0, relative_residual: 0.0, converged: true, history: alloc::vec![0.0] };
        return Ok((HsiCube::zeros(rows, cols, bands), report));
    }

    let mut x = match x0 {
        Some(g) if g.same_dims(rhs) && g.is_finite() => g.clone(),
        Some(g) if !g.same_dims(rhs) => return Err(dim_err!("initial guess is {:?}, rhs is {:?}", g.dims(), rhs.dims())),
        Some(_) => return Err(data_err!("initial guess contains non-finite values")),
        None => HsiCube::zeros(rows, cols, bands),
    };
    let mut ap = HsiCube::zeros(rows, cols, bands);
    op.apply_into(&x, &mut ap)?;
    let mut r = rhs.combine(1.0, &ap, -1.0)?;
    let mut p = r.clone();
    let mut rs = r.dot(&r);
    let mut history = alloc::vec![libm::sqrt(rs) / b_norm];
    let mut iterations = 0;

    while iterations < params.max_iter && history[history.len() - 1] > params.tol {
        op.apply_into(&p, &mut ap)?;
        let pap = p.dot(&ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rs / pap;
        for ((xi, ri), (&pi, &api)) in x
            .as_mut_slice()
            .iter_mut()
            .zip(r.as_mut_slice().iter_mut())
            .zip(p.as_slice().iter().zip(ap.as_slice()))
        {
            *xi += alpha * pi;
            *ri -= alpha * api;
        }
        let rs_new = r.dot(&r);
        let beta = rs_new / rs;
        for (pi, &ri) in p.as_mut_slice().iter_mut().zip(r.as_slice()) {
            *pi = ri + beta * *pi;
        }
        rs = rs_new;
        iterations += 1;
        history.push(libm::sqrt(rs) / b_norm);
    }
    if !x.is_finite() {
        return Err(data_err!("conjugate gradient produced non-finite values"));
    }
    let relative_residual = history[history.len() - 1];
    Ok((x, CgReport { iterations, relative_residual, converged: relative_residual <= params.tol, history }))
}
