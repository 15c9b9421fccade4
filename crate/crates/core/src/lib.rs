//! Intensity-aware 4D lookup tables for low-light video enhancement.
//!
//! The crate is `no_std` (it needs `alloc`). It covers the table itself and
//! its quadrilinear interpolation, basis fusion, the regularised training
//! objective and its optimiser, synthetic data, the per-pixel transform
//! kernel, and quality / brightness-consistency metrics. File formats, the
//! threaded pipeline and the command-line tool live in the `ialut` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod fit;
pub mod fusion;
pub mod grid;
pub mod losses;
pub mod lut;
pub mod metrics;
pub mod optim;
pub mod synth;
pub mod transform;
pub mod video;

pub use error::{Error, Result};
pub use fit::{fit, fit_tables, Clip, FitAbort, FitConfig, FitOutcome, FitReport, Fitted, IntensityMode};
pub use fusion::{identity_ialut, init_basis, BasisIaLutSet, BasisLutSet, WeightVector};
pub use grid::Grid1D;
pub use losses::LossWeights;
pub use lut::{ApplyGrad, CellIndex, CellIndex4, CornerWeights, IaLut4, Lut, Lut3};
pub use video::{IntensityMap, IntensityRule, VideoTensor};
