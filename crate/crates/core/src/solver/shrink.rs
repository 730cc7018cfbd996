use crate::error::{dim_err, usage_err, Result};
use crate::tensor::{hosvd, Tensor3, TuckerFactors};

/// How adaptive weights are refreshed between visits of a group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum WeightMode {
    /// `w = c / (|g| + ε)` from the group's last shrunk core.
    #[default]
    Magnitude,
    /// `w ← c / (|w| + ε)`, reweighting the previous weight itself.
    Literal,
}

/// Weighted soft threshold `sign(ĝ) · max(|ĝ| − w / 2τ, 0)`, elementwise.
pub fn shrink_core(g_hat: &Tensor3, w: &Tensor3, tau: f64) -> Result<Tensor3> {
    if !(tau > 0.0) {
        return Err(usage_err!("penalty tau must be positive, got {tau}"));
    }
    if g_hat.dims() != w.dims() {
        return Err(dim_err!("core {:?} vs weights {:?}", g_hat.dims(), w.dims()));
    }
    let data = g_hat
        .as_slice()
        .iter()
        .zip(w.as_slice())
        .map(|(&g, &wn)| soft_threshold(g, wn / (2.0 * tau)))
        .collect();
    Tensor3::from_vec(g_hat.dims(), data)
}

#[inline]
pub(crate) fn soft_threshold(x: f64, t: f64) -> f64 {
    let m = libm::fabs(x) - t;
    if m > 0.0 {
        libm::copysign(m, x)
    } else {
        0.0
    }
}

/// `w_n = c / (|g_n| + ε)`.
pub fn update_weights(g: &Tensor3, c: f64, eps: f64) -> Tensor3 {
    let data = g.as_slice().iter().map(|&x| c / (libm::fabs(x) + eps)).collect();
    Tensor3::from_vec(g.dims(), data).expect("same dims")
}

/// Per-group memory carried between outer iterations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GroupState {
    /// Weights used on the previous visit.
    pub weights: Option<Tensor3>,
    /// Shrunk core from the previous visit.
    pub last_core: Option<Tensor3>,
}

/// Shrinkage settings for [`denoise_group`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShrinkParams {
    pub tau: f64,
    pub c: f64,
    pub eps: f64,
    pub weight_mode: WeightMode,
}

/// Low-rank approximation of one stacked group.
///
/// Decomposes the group with HOSVD, picks weights (from the unshrunk core on
/// the first visit, otherwise per [`WeightMode`]), shrinks the core and
/// rebuilds the tensor from the shrunk core and the same factors.
pub fn denoise_group(stacked: &Tensor3, state: &mut GroupState, p: &ShrinkParams) -> Result<Tensor3> {
    let TuckerFactors { core, factors } = hosvd(stacked)?;
    let weights = weights_for(&core, state, p);
    let shrunk = shrink_core(&core, &weights, p.tau)?;
    let factors = TuckerFactors { core: shrunk, factors };
    let approx = factors.reconstruct()?;
    state.last_core = Some(factors.core);
    state.weights = Some(weights);
    Ok(approx)
}

fn weights_for(core: &Tensor3, state: &GroupState, p: &ShrinkParams) -> Tensor3 {
    let fresh = || update_weights(core, p.c, p.eps);
    match p.weight_mode {
        WeightMode::Magnitude => match &state.last_core {
            Some(prev) if prev.dims() == core.dims() => update_weights(prev, p.c, p.eps),
            _ => fresh(),
        },
        WeightMode::Literal => match &state.weights {
            Some(prev) if prev.dims() == core.dims() => update_weights(prev, p.c, p.eps),
            _ => fresh(),
        },
    }
}
