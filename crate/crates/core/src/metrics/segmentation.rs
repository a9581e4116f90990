use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::raster::{BinaryMask, Raster};

/// Pixel confusion counts of a binarized prediction against a burn mask.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    /// Counts unmasked pixels; a prediction `>= threshold` is positive.
    pub fn from_prediction(
        pred: &Raster,
        truth: &BinaryMask,
        threshold: f64,
    ) -> Result<Self, MetricError> {
        truth.matches(pred)?;
        let mut c = Self::default();
        for (i, v) in pred.valid() {
            match (v >= threshold, truth.bits()[i]) {
                (true, true) => c.tp += 1,
                (true, false) => c.fp += 1,
                (false, true) => c.fn_ += 1,
                (false, false) => c.tn += 1,
            }
        }
        Ok(c)
    }

    /// `TP / (TP + FP + FN)`, or 1 when prediction and truth are both empty.
    pub fn iou(&self) -> f64 {
        let union = self.tp + self.fp + self.fn_;
        if union == 0 {
            1.0
        } else {
            self.tp as f64 / union as f64
        }
    }
}

impl std::ops::Add for ConfusionCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self {
            tp: self.tp + o.tp,
            fp: self.fp + o.fp,
            fn_: self.fn_ + o.fn_,
            tn: self.tn + o.tn,
        }
    }
}

/// Intersection over union of `pred >= threshold` against `truth`.
pub fn iou(pred: &Raster, truth: &BinaryMask, threshold: f64) -> Result<f64, MetricError> {
    Ok(ConfusionCounts::from_prediction(pred, truth, threshold)?.iou())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::RasterError;

    fn mask(bits: &[u8]) -> BinaryMask {
        BinaryMask::new(bits.len(), 1, bits.iter().map(|&b| b == 1).collect()).unwrap()
    }

    fn pred(values: &[f64]) -> Raster {
        Raster::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn examples() {
        let truth = mask(&[1, 1, 0, 0, 0, 0]);
        assert_eq!(iou(&pred(&[1.0, 1.0, 0.0, 0.0, 0.0, 0.0]), &truth, 0.5).unwrap(), 1.0);
        assert_eq!(iou(&pred(&[0.0, 0.0, 1.0, 1.0, 0.0, 0.0]), &truth, 0.5).unwrap(), 0.0);
        assert_eq!(iou(&pred(&[1.0, 1.0, 1.0, 1.0, 0.0, 0.0]), &truth, 0.5).unwrap(), 0.5);
        assert_eq!(iou(&pred(&[0.0; 6]), &mask(&[0; 6]), 0.5).unwrap(), 1.0);
    }

    #[test]
    fn threshold_is_inclusive() {
        assert_eq!(iou(&pred(&[0.5]), &mask(&[1]), 0.5).unwrap(), 1.0);
        assert_eq!(iou(&pred(&[0.4999]), &mask(&[1]), 0.5).unwrap(), 0.0);
    }

    #[test]
    fn masked_pixels_skip_and_dims_checked() {
        let p = Raster::with_nodata(2, 1, vec![1.0, 1.0], vec![false, true]).unwrap();
        let c = ConfusionCounts::from_prediction(&p, &mask(&[1, 0]), 0.5).unwrap();
        assert_eq!(c, ConfusionCounts { tp: 1, ..Default::default() });
        assert!(matches!(
            iou(&pred(&[1.0]), &mask(&[1, 0]), 0.5),
            Err(MetricError::Raster(RasterError::DimensionMismatch { .. }))
        ));
    }
}
