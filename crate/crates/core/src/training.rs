//! Policy-optimization and raster-loss numerics.
//!
//! Nothing here runs a model: rewards are scored from parsed oracle text,
//! and the GRPO objective is evaluated from supplied sequence
//! log-probabilities.

mod film;
mod grpo;
mod loss;
mod reward;

use thiserror::Error;

pub use film::{film, FeatureMap};
pub use grpo::{clipped_term, grpo_objective, group_advantages, kl_estimate, GrpoConfig, RolloutGroup, ZERO_STD_THRESHOLD};
pub use loss::{composite_loss, smooth_l1, LossComponents, LossWeights};
pub use reward::{parse_oracle_output, reward, OracleAnswer, RewardConfig};

use crate::metrics::MetricError;
use crate::raster::RasterError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TrainingError {
    #[error("ordinal label {0} outside 0..=9")]
    LabelOutOfRange(u8),
    #[error("invalid reward config: {0}")]
    RewardConfig(String),
    #[error("invalid GRPO config: {0}")]
    GrpoConfig(String),
    #[error("a group needs at least 2 rollouts, got {0}")]
    GroupTooSmall(usize),
    #[error("rollout field {field} has {actual} entries, expected {expected}")]
    RaggedGroup {
        field: &'static str,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite {field} at rollout {index}")]
    NonFinite { field: &'static str, index: usize },
    #[error("{0} is empty")]
    Empty(&'static str),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid loss weights: {0}")]
    LossWeights(String),
    #[error("FiLM expects {channels} gamma/beta values, got {gamma}/{beta}")]
    FilmChannels {
        channels: usize,
        gamma: usize,
        beta: usize,
    },
    #[error("feature map of {channels}x{height}x{width} needs {expected} values, got {actual}")]
    FeatureShape {
        channels: usize,
        height: usize,
        width: usize,
        expected: usize,
        actual: usize,
    },
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}
