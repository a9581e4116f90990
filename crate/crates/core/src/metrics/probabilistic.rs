use serde::{Deserialize, Serialize};

use super::{check_finite, check_probabilities, MetricError};
use crate::numeric::CompensatedSum;

fn check_pairs(probs: &[f64], labels: &[bool]) -> Result<(), MetricError> {
    if probs.len() != labels.len() {
        return Err(MetricError::LengthMismatch {
            left: probs.len(),
            right: labels.len(),
        });
    }
    if probs.is_empty() {
        return Err(MetricError::Empty("probabilities"));
    }
    check_probabilities(probs)
}

/// Brier score: mean squared deviation of probabilities from binary outcomes.
pub fn brier(probs: &[f64], labels: &[bool]) -> Result<f64, MetricError> {
    check_pairs(probs, labels)?;
    let mut acc = CompensatedSum::new();
    for (&p, &y) in probs.iter().zip(labels) {
        let d = p - f64::from(u8::from(y));
        acc.add(d * d);
    }
    Ok(acc.total() / probs.len() as f64)
}

fn sorted(scores: &[f64]) -> Vec<f64> {
    let mut s = scores.to_vec();
    s.sort_by(f64::total_cmp);
    s
}

/// Area under the ROC curve as the Mann-Whitney statistic
/// `P(X_pos > X_neg) + 0.5 P(X_pos = X_neg)`.
///
/// Pairs are counted exactly (in half-units) with a merge over the sorted
/// score lists, so the result is the same as brute-force pair counting.
pub fn roc_auc(positives: &[f64], negatives: &[f64]) -> Result<f64, MetricError> {
    if positives.is_empty() {
        return Err(MetricError::Empty("positive scores"));
    }
    if negatives.is_empty() {
        return Err(MetricError::Empty("negative scores"));
    }
    check_finite(positives)?;
    check_finite(negatives)?;
    let pos = sorted(positives);
    let neg = sorted(negatives);

    let mut twice: u128 = 0;
    let (mut below, mut upto) = (0usize, 0usize);
    for &p in &pos {
        while below < neg.len() && neg[below] < p {
            below += 1;
        }
        upto = upto.max(below);
        while upto < neg.len() && neg[upto] == p {
            upto += 1;
        }
        twice += 2 * below as u128 + (upto - below) as u128;
    }
    Ok(twice as f64 / 2.0 / (pos.len() as f64 * neg.len() as f64))
}

/// One operating point of the ROC curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Scores `>= threshold` are called positive.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve points at every distinct score, from the highest threshold down,
/// starting at `(0, 0)` with an infinite threshold.
pub fn roc_curve(positives: &[f64], negatives: &[f64]) -> Result<Vec<RocPoint>, MetricError> {
    if positives.is_empty() {
        return Err(MetricError::Empty("positive scores"));
    }
    if negatives.is_empty() {
        return Err(MetricError::Empty("negative scores"));
    }
    check_finite(positives)?;
    check_finite(negatives)?;
    let mut all: Vec<(f64, bool)> = positives
        .iter()
        .map(|&s| (s, true))
        .chain(negatives.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (np, nn) = (positives.len() as f64, negatives.len() as f64);
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    let mut i = 0;
    while i < all.len() {
        let t = all[i].0;
        while i < all.len() && all[i].0 == t {
            if all[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold: t,
            fpr: fp as f64 / nn,
            tpr: tp as f64 / np,
        });
    }
    Ok(points)
}

/// One bin of a reliability diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBin {
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// Mean predicted probability; `None` for an empty bin.
    pub confidence: Option<f64>,
    /// Observed positive frequency; `None` for an empty bin.
    pub frequency: Option<f64>,
}

/// Equal-width reliability bins over `[0, 1]`. Bins are left-closed and
/// right-open except the last, which also takes `p = 1`.
pub fn reliability_bins(
    probs: &[f64],
    labels: &[bool],
    bins: usize,
) -> Result<Vec<ReliabilityBin>, MetricError> {
    if bins == 0 {
        return Err(MetricError::ZeroBins);
    }
    check_pairs(probs, labels)?;
    let mut conf = vec![CompensatedSum::new(); bins];
    let mut positives = vec![0usize; bins];
    let mut counts = vec![0usize; bins];
    for (&p, &y) in probs.iter().zip(labels) {
        let b = ((p * bins as f64).floor() as usize).min(bins - 1);
        conf[b].add(p);
        counts[b] += 1;
        positives[b] += usize::from(y);
    }
    Ok((0..bins)
        .map(|b| {
            let n = counts[b];
            ReliabilityBin {
                lower: b as f64 / bins as f64,
                upper: (b + 1) as f64 / bins as f64,
                count: n,
                confidence: (n > 0).then(|| conf[b].total() / n as f64),
                frequency: (n > 0).then(|| positives[b] as f64 / n as f64),
            }
        })
        .collect())
}

/// Expected calibration error: the count-weighted gap between mean
/// predicted probability and observed positive frequency per bin.
pub fn ece(probs: &[f64], labels: &[bool], bins: usize) -> Result<f64, MetricError> {
    let table = reliability_bins(probs, labels, bins)?;
    let n = probs.len() as f64;
    let mut acc = CompensatedSum::new();
    for bin in &table {
        if let (Some(c), Some(f)) = (bin.confidence, bin.frequency) {
            acc.add(bin.count as f64 / n * (f - c).abs());
        }
    }
    Ok(acc.total())
}
