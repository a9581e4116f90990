//! Deterministic numerics for wildfire risk raster benchmarks.
//!
//! The crate covers the whole evaluation and training-math surface:
//!
//! - [`raster`] and [`quintile`]: the raster substrate, range matching,
//!   finite differences, ordinal discretization and rank normalization.
//! - [`dataset`]: tiling, supertile crops, stratified splits and climate
//!   vectors.
//! - [`metrics`]: per-pixel errors, SSIM, Brier, ROC AUC, ECE, IoU, QWK and
//!   the background-pixel rule for out-of-distribution scoring.
//! - [`training`]: GRPO rewards, advantages and objective, the composite
//!   raster loss and FiLM modulation.
//! - [`interpretability`]: fidelity and consistency scores.
//! - [`io`] and [`evaluation`]: the raster container, manifests, reports and
//!   the batch evaluation driver.
//!
//! Every function is pure and safe to call from any number of threads.

pub mod dataset;
pub mod evaluation;
pub mod interpretability;
pub mod io;
pub mod metrics;
pub mod numeric;
pub mod quintile;
pub mod raster;
pub mod training;

pub use raster::{BinaryMask, Raster, RasterError, RasterMeta};

/// Version string recorded in report provenance.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
