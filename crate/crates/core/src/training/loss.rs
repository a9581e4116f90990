use serde::{Deserialize, Serialize};

use super::TrainingError;
use crate::metrics::{ssim, MetricError, SsimParams};
use crate::numeric::CompensatedSum;
use crate::raster::{finite_diff, match_range, Raster};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LossWeights {
    pub ssim_weight: f64,
    pub edge_weight: f64,
    pub smooth_l1_beta: f64,
    pub ssim_params: SsimParams,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            ssim_weight: 0.5,
            edge_weight: 0.2,
            smooth_l1_beta: 1.0,
            ssim_params: SsimParams::default(),
        }
    }
}

impl LossWeights {
    pub fn validate(&self) -> Result<(), TrainingError> {
        if !(self.ssim_weight >= 0.0 && self.edge_weight >= 0.0) {
            return Err(TrainingError::LossWeights("weights must be non-negative".into()));
        }
        if !(self.smooth_l1_beta > 0.0) {
            return Err(TrainingError::LossWeights("smooth-l1 beta must be positive".into()));
        }
        self.ssim_params.validate()?;
        Ok(())
    }
}

/// The three raw loss terms before weighting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossComponents {
    /// Smooth-L1 reconstruction error.
    pub reconstruction: f64,
    /// SSIM of the range-matched rasters (the structure term is `1 - ssim`).
    pub ssim: f64,
    /// Mean absolute difference of first-order finite differences.
    pub edge: f64,
}

impl LossComponents {
    pub fn total(&self, w: &LossWeights) -> f64 {
        self.reconstruction + w.ssim_weight * (1.0 - self.ssim) + w.edge_weight * self.edge
    }
}

/// Mean Smooth-L1 (Huber-style) error with transition point `beta`.
pub fn smooth_l1(y: &Raster, yhat: &Raster, beta: f64) -> Result<f64, TrainingError> {
    if !(beta > 0.0) {
        return Err(TrainingError::LossWeights("smooth-l1 beta must be positive".into()));
    }
    y.same_dims(yhat)?;
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for (i, (&a, &b)) in y.values().iter().zip(yhat.values()).enumerate() {
        if y.is_masked(i) || yhat.is_masked(i) {
            continue;
        }
        let d = (a - b).abs();
        acc.add(if d < beta { 0.5 * d * d / beta } else { d - 0.5 * beta });
        n += 1;
    }
    if n == 0 {
        return Err(MetricError::NoEvaluablePixels.into());
    }
    Ok(acc.total() / n as f64)
}

/// Edge term: absolute gradient differences pooled over both axes.
fn edge_l1(y: &Raster, yhat: &Raster) -> Result<f64, TrainingError> {
    let (ydx, ydy) = finite_diff(y)?;
    let (pdx, pdy) = finite_diff(yhat)?;
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for (a, b) in [(&ydx, &pdx), (&ydy, &pdy)] {
        for (i, (&u, &v)) in a.values().iter().zip(b.values()).enumerate() {
            if a.is_masked(i) || b.is_masked(i) {
                continue;
            }
            acc.add((u - v).abs());
            n += 1;
        }
    }
    if n == 0 {
        return Err(MetricError::NoEvaluablePixels.into());
    }
    Ok(acc.total() / n as f64)
}

/// Composite raster loss: Smooth-L1 reconstruction, plus weighted SSIM
/// structure on range-matched rasters, plus the weighted edge term.
///
/// Targets are expected in `[-1, 1]`.
pub fn composite_loss(
    y: &Raster,
    yhat: &Raster,
    w: &LossWeights,
) -> Result<(f64, LossComponents), TrainingError> {
    w.validate()?;
    y.same_dims(yhat)?;
    let components = LossComponents {
        reconstruction: smooth_l1(y, yhat, w.smooth_l1_beta)?,
        ssim: ssim(&match_range(y), &match_range(yhat), &w.ssim_params)?,
        edge: edge_l1(y, yhat)?,
    };
    Ok((components.total(w), components))
}
