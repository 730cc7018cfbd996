//! Alternating-minimization reconstruction.
//!
//! The solver minimizes
//!
//! ```text
//! ½‖Y − Φ f‖² + Σ_l ( τ‖R_l f − G_l ×₁ U₁ ×₂ U₂ ×₃ U₃‖² + ‖w_l ∘ G_l‖₁ )
//! ```
//!
//! by alternating a per-group weighted core shrinkage with a global
//! least-squares image update solved by conjugate gradients.

mod cg;
mod shrink;

pub use cg::{cg_solve_image, CgParams, CgReport, ImageOperator};
pub use shrink::{denoise_group, shrink_core, update_weights, GroupState, ShrinkParams, WeightMode};

use alloc::vec::Vec;

use crate::cube::HsiCube;
use crate::error::{usage_err, Result};
use crate::imaging::{adjoint, forward, Measurement, SystemModel};
#[cfg(feature = "parallel")]
use crate::patch::match_blocks_strided;
#[cfg(not(feature = "parallel"))]
use crate::patch::match_all;
use crate::patch::{build_group, plan_grid, Aggregator, PatchGrid, Position};
use crate::tensor::Tensor3;

/// Tikhonov weight of the initial back-projection, `(ΦᵀΦ + μI) f⁰ = Φᵀ Y`.
pub const INIT_TIKHONOV: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Fidelity penalty between groups and their low-rank estimates.
    pub tau: f64,
    /// Numerator of the adaptive weights.
    pub c: f64,
    /// Denominator guard of the adaptive weights.
    pub eps: f64,
    pub patch_size: usize,
    pub step: usize,
    /// Patches per group, the reference patch included.
    pub k: usize,
    /// Search half-width around each reference patch.
    pub window: usize,
    pub search_stride: usize,
    pub max_iter: usize,
    pub cg: CgParams,
    /// Block matching is redone on outer iterations 1, 1 + n, 1 + 2n, ...
    pub rematch_every: usize,
    pub weight_mode: WeightMode,
    /// Optional early stop on `‖f_t − f_{t−1}‖ / ‖f_{t−1}‖`.
    pub rel_change_tol: Option<f64>,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            tau: 1.0,
            c: 0.0055,
            eps: 1e-6,
            patch_size: 5,
            step: 4,
            k: 45,
            window: 20,
            search_stride: 1,
            max_iter: 600,
            cg: CgParams::default(),
            rematch_every: 40,
            weight_mode: WeightMode::Magnitude,
            rel_change_tol: None,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("tau", self.tau), ("c", self.c), ("eps", self.eps), ("cg tolerance", self.cg.tol)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(usage_err!("{name} must be positive and finite, got {v}"));
            }
        }
        for (name, v) in [
            ("patch size", self.patch_size),
            ("step", self.step),
            ("k", self.k),
            ("search stride", self.search_stride),
            ("rematch interval", self.rematch_every),
        ] {
            if v == 0 {
                return Err(usage_err!("{name} must be at least 1"));
            }
        }
        Ok(())
    }

    pub fn shrink(&self) -> ShrinkParams {
        ShrinkParams { tau: self.tau, c: self.c, eps: self.eps, weight_mode: self.weight_mode }
    }
}

/// Progress of one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    /// 1-based outer iteration.
    pub iter: usize,
    /// Data-fit residual `‖Y − Φ f‖_F` after the image update.
    pub residual: f64,
    pub cg_iterations: usize,
    pub cg_relative_residual: f64,
    pub cg_converged: bool,
}

/// Receives one record per outer iteration.
pub trait ProgressSink {
    fn record(&mut self, rec: &IterationRecord);
}

impl<F: FnMut(&IterationRecord)> ProgressSink for F {
    fn record(&mut self, rec: &IterationRecord) {
        self(rec)
    }
}

/// `‖Y − Φ f‖_F`.
pub fn data_residual(y: &Measurement, f: &HsiCube, sys: &SystemModel) -> Result<f64> {
    Ok(y.sub(&forward(f, sys)?)?.norm())
}

/// Regularized back-projection used to start the iteration.
pub fn initial_estimate(y: &Measurement, sys: &SystemModel, cg: &CgParams) -> Result<HsiCube> {
    let rhs = adjoint(y, sys)?;
    let (rows, cols, bands) = rhs.dims();
    let ones = HsiCube::filled(rows, cols, bands, 1.0);
    let (f, _) = cg_solve_image(&rhs, &ones, sys, INIT_TIKHONOV / 2.0, None, cg)?;
    Ok(f)
}

/// Group memberships plus per-group adaptive state.
#[derive(Debug, Clone, Default)]
pub struct GroupBank {
    pub members: Vec<Vec<Position>>,
    pub states: Vec<GroupState>,
}

impl GroupBank {
    /// Low-rank estimates of every group of `f`, in anchor order.
    pub fn denoise_all(&mut self, f: &HsiCube, patch_size: usize, p: &ShrinkParams) -> Result<Vec<Tensor3>> {
        let work = |(members, state): (&Vec<Position>, &mut GroupState)| -> Result<Tensor3> {
            let g = build_group(f, members, patch_size)?;
            denoise_group(&g.stacked, state, p)
        };
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            self.members.par_iter().zip(self.states.par_iter_mut()).map(work).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            self.members.iter().zip(self.states.iter_mut()).map(work).collect()
        }
    }
}

/// Reconstructs a cube from a snapshot measurement.
///
/// Starts from [`initial_estimate`], then alternates group shrinkage and
/// the CG image update for `max_iter` outer iterations. The returned cube
/// is clamped to `[0, 1]`.
pub fn reconstruct(
    y: &Measurement,
    sys: &SystemModel,
    p: &SolverParams,
    mut progress: Option<&mut dyn ProgressSink>,
) -> Result<HsiCube> {
    p.validate()?;
    let (rows, cols, bands) = (sys.rows(), sys.cols(), sys.bands());
    let grid = plan_grid(rows, cols, p.patch_size, p.step)?;
    let shrink = p.shrink();
    let backprojected = adjoint(y, sys)?;
    let mut f = initial_estimate(y, sys, &p.cg)?;

    let mut bank = GroupBank { members: Vec::new(), states: alloc::vec![GroupState::default(); grid.anchors.len()] };
    for t in 1..=p.max_iter {
        if (t - 1) % p.rematch_every == 0 {
            bank.members = rematch(&f, &grid, p)?;
        }
        let approx = bank.denoise_all(&f, p.patch_size, &shrink)?;
        let mut acc = Aggregator::new(rows, cols, bands, p.patch_size);
        for (members, values) in bank.members.iter().zip(&approx) {
            acc.add(members, values)?;
        }
        let (sum, counts) = acc.finish();
        let rhs = backprojected.combine(1.0, &sum, 2.0 * p.tau)?;
        let (next, report) = cg_solve_image(&rhs, &counts, sys, p.tau, Some(&f), &p.cg)?;

        let change = next.combine(1.0, &f, -1.0)?.norm() / f.norm().max(f64::MIN_POSITIVE);
        f = next;
        if let Some(sink) = progress.as_deref_mut() {
            sink.record(&IterationRecord {
                iter: t,
                residual: data_residual(y, &f, sys)?,
                cg_iterations: report.iterations,
                cg_relative_residual: report.relative_residual,
                cg_converged: report.converged,
            });
        }
        if p.rel_change_tol.is_some_and(|tol| change <= tol) {
            break;
        }
    }
    f.clamp(0.0, 1.0);
    Ok(f)
}

fn rematch(f: &HsiCube, grid: &PatchGrid, p: &SolverParams) -> Result<Vec<Vec<Position>>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.anchors
            .par_iter()
            .map(|&a| match_blocks_strided(f, a, grid.patch_size, p.k, p.window, p.search_stride))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        match_all(f, grid, p.k, p.window, p.search_stride)
    }
}
