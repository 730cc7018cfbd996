//! Reconstruction of hyperspectral cubes from a single coded snapshot.
//!
//! The crate simulates coded-aperture snapshot imaging (optionally with a
//! co-located panchromatic camera) and recovers the cube by alternating a
//! weighted shrinkage of HOSVD cores over nonlocal patch groups with a
//! conjugate-gradient image update.
//!
//! It is `no_std` (with `alloc`) unless the `std` or `parallel` features are
//! enabled; `parallel` spreads block matching and group shrinkage across a
//! rayon pool without changing results.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;

pub mod cube;
pub mod imaging;
pub mod linalg;
pub mod metrics;
pub mod patch;
pub mod solver;
pub mod synthetic;
pub mod tensor;

pub use cube::{HsiCube, Plane};
pub use error::{Error, Result};
pub use imaging::{Measurement, SystemMode, SystemModel};
pub use metrics::QualityReport;
pub use patch::{PatchGrid, PatchGroup, Position};
pub use solver::{reconstruct, SolverParams};
pub use tensor::{hosvd, Mode, Tensor3, TuckerFactors};
