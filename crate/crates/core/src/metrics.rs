//! Evaluation metrics: per-pixel errors, structural similarity, probabilistic
//! discrimination and calibration, segmentation overlap and ordinal agreement.

mod background;
mod ordinal;
mod pixel;
mod probabilistic;
mod segmentation;
mod ssim;

use thiserror::Error;

pub use background::{assemble_pixel_eval, OodRole, OodTile, PixelEvalSet};
pub use ordinal::{qwk, OrdinalPair};
pub use pixel::{mae, mse};
pub use probabilistic::{brier, ece, reliability_bins, roc_auc, roc_curve, ReliabilityBin, RocPoint};
pub use segmentation::{iou, ConfusionCounts};
pub use ssim::{ssim, SsimParams};

use crate::raster::RasterError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("{0} is empty")]
    Empty(&'static str),
    #[error("no evaluable pixels")]
    NoEvaluablePixels,
    #[error("non-finite score {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("probability {value} at index {index} outside [0, 1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("invalid SSIM parameters: {0}")]
    InvalidSsimParams(String),
    #[error("raster {width}x{height} is smaller than SSIM window {window}")]
    SmallerThanWindow { width: usize, height: usize, window: usize },
    #[error("ordinal label {value} at pair {index} outside 0..{k}")]
    InvalidLabel { index: usize, value: u8, k: usize },
    #[error("number of bins must be positive")]
    ZeroBins,
    #[error("kappa undefined: expected disagreement is zero but observed is not")]
    UndefinedKappa,
    #[error("event tile {0:?} has no burn mask")]
    MissingMask(String),
    #[error("control tile {0:?} carries a burn mask")]
    UnexpectedMask(String),
}

fn check_finite(values: &[f64]) -> Result<(), MetricError> {
    match values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        Some((index, &value)) => Err(MetricError::NonFinite { index, value }),
        None => Ok(()),
    }
}

fn check_probabilities(values: &[f64]) -> Result<(), MetricError> {
    match values
        .iter()
        .enumerate()
        .find(|(_, v)| !(0.0..=1.0).contains(*v))
    {
        Some((index, &value)) => Err(MetricError::ProbabilityOutOfRange { index, value }),
        None => Ok(()),
    }
}
