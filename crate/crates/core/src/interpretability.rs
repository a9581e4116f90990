//! Fidelity and consistency of predictions under reasoning-trace edits.
//!
//! Both scores compare an original prediction raster against one produced
//! after the oracle's reasoning was modified: adversarially perturbed
//! (fidelity) or paraphrased (consistency).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::CompensatedSum;
use crate::raster::{Raster, RasterError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error("expected a {expected:?} pair, got {actual:?}")]
    WrongKind {
        expected: ModificationKind,
        actual: ModificationKind,
    },
    #[error("no pixel has a defined fidelity ratio")]
    NoEvaluablePixels,
    #[error("no tile scores to aggregate")]
    NoScores,
    #[error(transparent)]
    Raster(#[from] RasterError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModificationKind {
    Perturbed,
    Paraphrased,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairedPrediction {
    pub original: Raster,
    pub modified: Raster,
    pub kind: ModificationKind,
}

impl PairedPrediction {
    pub fn new(original: Raster, modified: Raster, kind: ModificationKind) -> Result<Self, InterpError> {
        original.same_dims(&modified)?;
        original.check_range(0.0, 1.0)?;
        modified.check_range(0.0, 1.0)?;
        Ok(Self {
            original,
            modified,
            kind,
        })
    }

    fn expect(&self, expected: ModificationKind) -> Result<(), InterpError> {
        if self.kind != expected {
            return Err(InterpError::WrongKind {
                expected,
                actual: self.kind,
            });
        }
        Ok(())
    }

    fn joint(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.original
            .valid()
            .filter(|(i, _)| !self.modified.is_masked(*i))
            .map(|(i, y)| (y, self.modified.values()[i]))
    }
}

/// Mean fraction of the maximal shift realized toward the opposite end of
/// the scale: `(y~ - y) / (y* - y)` with `y* = 1` when `y < 0.5`, else 0.
///
/// Pixels whose ratio is undefined (`y == y*`) are left out of the mean.
pub fn fidelity(pair: &PairedPrediction) -> Result<f64, InterpError> {
    pair.expect(ModificationKind::Perturbed)?;
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for (y, shifted) in pair.joint() {
        let target = if y < 0.5 { 1.0 } else { 0.0 };
        if target == y {
            continue;
        }
        acc.add((shifted - y) / (target - y));
        n += 1;
    }
    if n == 0 {
        return Err(InterpError::NoEvaluablePixels);
    }
    Ok(acc.total() / n as f64)
}

/// One minus the mean shift normalized by the room available in the
/// direction of the shift.
pub fn consistency(pair: &PairedPrediction) -> Result<f64, InterpError> {
    pair.expect(ModificationKind::Paraphrased)?;
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for (y, para) in pair.joint() {
        let room = if para < y {
            y
        } else if para > y {
            1.0 - y
        } else {
            1.0
        };
        acc.add((para - y).abs() / room);
        n += 1;
    }
    if n == 0 {
        return Err(InterpError::NoEvaluablePixels);
    }
    Ok(1.0 - acc.total() / n as f64)
}

/// Unweighted mean of per-tile scores, reduced in tile-id order.
pub fn aggregate_scores(scores: &BTreeMap<String, f64>) -> Result<f64, InterpError> {
    if scores.is_empty() {
        return Err(InterpError::NoScores);
    }
    let total: CompensatedSum = scores.values().copied().collect();
    Ok(total.total() / scores.len() as f64)
}
