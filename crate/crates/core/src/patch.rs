//! Nonlocal patch grouping.
//!
//! A group stacks `k` full-band `s × s` patches into an `s² × bands × k`
//! tensor. Inside a patch, pixel `(dr, dc)` maps to row `dc * s + dr` of the
//! stacked tensor (column-major vectorization of the spatial block).

use alloc::vec;
use alloc::vec::Vec;

use crate::cube::HsiCube;
use crate::error::{dim_err, usage_err, Result};
use crate::tensor::Tensor3;

/// Top-left corner of a patch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    pub row: usize,
    pub col: usize,
}

impl Position {
    pub const fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

/// Reference patch anchors covering an image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatchGrid {
    pub patch_size: usize,
    pub step: usize,
    /// Row-major sorted anchors.
    pub anchors: Vec<Position>,
}

/// Offsets `{0, step, 2·step, …}` below `len − s`, plus `len − s` itself.
fn axis_anchors(len: usize, s: usize, step: usize) -> Vec<usize> {
    let last = len - s;
    let mut v: Vec<usize> = (0..=last).step_by(step).collect();
    if *v.last().unwrap() != last {
        v.push(last);
    }
    v
}

pub fn plan_grid(rows: usize, cols: usize, s: usize, step: usize) -> Result<PatchGrid> {
    if s == 0 || s > rows.min(cols) {
        return Err(usage_err!("patch size {s} must lie in 1..={}", rows.min(cols)));
    }
    if step == 0 {
        return Err(usage_err!("patch step must be at least 1"));
    }
    let rs = axis_anchors(rows, s, step);
    let cs = axis_anchors(cols, s, step);
    let anchors = rs.iter().flat_map(|&r| cs.iter().map(move |&c| Position::new(r, c))).collect();
    Ok(PatchGrid { patch_size: s, step, anchors })
}

/// Full-band squared Euclidean distance between two patches.
pub fn patch_distance(f: &HsiCube, a: Position, b: Position, s: usize) -> f64 {
    let mut d = 0.0;
    for band in 0..f.bands() {
        let plane = f.band(band);
        for dr in 0..s {
            let ra = &plane[(a.row + dr) * f.cols() + a.col..][..s];
            let rb = &plane[(b.row + dr) * f.cols() + b.col..][..s];
            for (x, y) in ra.iter().zip(rb) {
                let e = x - y;
                d += e * e;
            }
        }
    }
    d
}

fn check_anchor(f: &HsiCube, p: Position, s: usize) -> Result<()> {
    if s == 0 || p.row + s > f.rows() || p.col + s > f.cols() {
        return Err(usage_err!(
            "patch of size {s} at ({}, {}) does not fit a {}x{} image",
            p.row,
            p.col,
            f.rows(),
            f.cols()
        ));
    }
    Ok(())
}

/// Finds the `k − 1` nearest patches to `anchor` within `±window` (stride 1).
///
/// The result starts with `anchor`; remaining entries are sorted by
/// distance with row-major scan order breaking ties. When the window holds
/// fewer than `k` positions the list repeats cyclically.
pub fn match_blocks(f: &HsiCube, anchor: Position, s: usize, k: usize, window: usize) -> Result<Vec<Position>> {
    match_blocks_strided(f, anchor, s, k, window, 1)
}

/// [`match_blocks`] visiting every `stride`-th candidate offset.
pub fn match_blocks_strided(
    f: &HsiCube,
    anchor: Position,
    s: usize,
    k: usize,
    window: usize,
    stride: usize,
) -> Result<Vec<Position>> {
    check_anchor(f, anchor, s)?;
    if k == 0 {
        return Err(usage_err!("group size k must be at least 1"));
    }
    if stride == 0 {
        return Err(usage_err!("search stride must be at least 1"));
    }
    let (max_r, max_c) = (f.rows() - s, f.cols() - s);
    let r0 = anchor.row.saturating_sub(window);
    let r1 = (anchor.row + window).min(max_r);
    let c0 = anchor.col.saturating_sub(window);
    let c1 = (anchor.col + window).min(max_c);

    let mut scored: Vec<(f64, Position)> = Vec::new();
    for r in (r0..=r1).step_by(stride) {
        for c in (c0..=c1).step_by(stride) {
            let p = Position::new(r, c);
            if p != anchor {
                scored.push((patch_distance(f, anchor, p, s), p));
            }
        }
    }
    // Stable sort keeps scan order among equal distances.
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut members = Vec::with_capacity(k);
    members.push(anchor);
    members.extend(scored.iter().take(k - 1).map(|&(_, p)| p));
    let distinct = members.len();
    while members.len() < k {
        members.push(members[members.len() % distinct]);
    }
    Ok(members)
}

/// One nonlocal group: member positions and the stacked tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchGroup {
    pub anchor: Position,
    pub members: Vec<Position>,
    pub stacked: Tensor3,
}

/// Copies the member patches of `f` into an `s² × bands × k` tensor.
pub fn build_group(f: &HsiCube, members: &[Position], s: usize) -> Result<PatchGroup> {
    let anchor = *members.first().ok_or_else(|| usage_err!("a group needs at least one member"))?;
    for &m in members {
        check_anchor(f, m, s)?;
    }
    let bands = f.bands();
    let k = members.len();
    let mut stacked = Tensor3::zeros(s * s, bands, k);
    let out = stacked.as_mut_slice();
    for band in 0..bands {
        let plane = f.band(band);
        for (m, pos) in members.iter().enumerate() {
            for dc in 0..s {
                for dr in 0..s {
                    let v = plane[(pos.row + dr) * f.cols() + pos.col + dc];
                    out[((dc * s + dr) * bands + band) * k + m] = v;
                }
            }
        }
    }
    Ok(PatchGroup { anchor, members: members.to_vec(), stacked })
}

/// Scatter-add accumulator implementing `Σ_l R_lᵀ(·)` together with the
/// diagonal of `Σ_l R_lᵀR_l`.
#[derive(Debug, Clone)]
pub struct Aggregator {
    patch_size: usize,
    sum: HsiCube,
    counts: HsiCube,
}

impl Aggregator {
    pub fn new(rows: usize, cols: usize, bands: usize, patch_size: usize) -> Self {
        Self {
            patch_size,
            sum: HsiCube::zeros(rows, cols, bands),
            counts: HsiCube::zeros(rows, cols, bands),
        }
    }

    /// Adds one group's (approximated) stacked tensor.
    pub fn add(&mut self, members: &[Position], values: &Tensor3) -> Result<()> {
        let s = self.patch_size;
        let (rows, cols, bands) = self.sum.dims();
        if values.dims() != [s * s, bands, members.len()] {
            return Err(dim_err!(
                "group tensor is {:?} but {} members of size {s} need {:?}",
                values.dims(),
                members.len(),
                [s * s, bands, members.len()]
            ));
        }
        if let Some(p) = members.iter().find(|p| p.row + s > rows || p.col + s > cols) {
            return Err(dim_err!("member ({}, {}) falls outside a {rows}x{cols} image", p.row, p.col));
        }
        let k = members.len();
        let src = values.as_slice();
        for (m, pos) in members.iter().enumerate() {
            for band in 0..bands {
                for dc in 0..s {
                    for dr in 0..s {
                        let idx = self.sum.index(pos.row + dr, pos.col + dc, band);
                        self.sum.as_mut_slice()[idx] += src[((dc * s + dr) * bands + band) * k + m];
                        self.counts.as_mut_slice()[idx] += 1.0;
                    }
                }
            }
        }
        Ok(())
    }

    /// Resets the accumulated sums, keeping the counts.
    pub fn clear_sum(&mut self) {
        self.sum.as_mut_slice().fill(0.0);
    }

    pub fn sum(&self) -> &HsiCube {
        &self.sum
    }

    pub fn counts(&self) -> &HsiCube {
        &self.counts
    }

    pub fn finish(self) -> (HsiCube, HsiCube) {
        (self.sum, self.counts)
    }
}

/// Scatters every `(group, values)` pair back onto a `rows × cols × bands`
/// cube, returning the voxel sums and contribution counts. Groups are
/// accumulated in the order given.
pub fn aggregate<'a, I>(groups: I, dims: (usize, usize, usize), patch_size: usize) -> Result<(HsiCube, HsiCube)>
where
    I: IntoIterator<Item = (&'a PatchGroup, &'a Tensor3)>,
{
    let mut acc = Aggregator::new(dims.0, dims.1, dims.2, patch_size);
    for (group, values) in groups {
        acc.add(&group.members, values)?;
    }
    Ok(acc.finish())
}

/// Positions of every grid anchor's group, matched on `f`.
pub fn match_all(f: &HsiCube, grid: &PatchGrid, k: usize, window: usize, stride: usize) -> Result<Vec<Vec<Position>>> {
    let mut out = vec![];
    for &a in &grid.anchors {
        out.push(match_blocks_strided(f, a, grid.patch_size, k, window, stride)?);
    }
    Ok(out)
}
