//! Rank-based normalization of risk values into `[0, 1]`.
//!
//! A [`QuintileTransform`] is fit once on a reference population. Each
//! distinct reference value `v` is assigned the position `(r - 0.5) / n`,
//! where `r` is its 1-based rank (average rank over ties) and `n` the
//! population size. Values between two breakpoints interpolate linearly;
//! values outside the reference range clamp to 0 or 1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::raster::Raster;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuintileError {
    #[error("reference population needs at least 2 distinct values, got {distinct}")]
    DegeneratePopulation { distinct: usize },
    #[error("non-finite reference value {value} at index {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("malformed transform: {0}")]
    Malformed(&'static str),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TransformRepr", into = "TransformRepr")]
pub struct QuintileTransform {
    breakpoints: Vec<f64>,
    positions: Vec<f64>,
    population: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransformRepr {
    tie_rule: String,
    population: usize,
    breakpoints: Vec<f64>,
    positions: Vec<f64>,
}

const TIE_RULE: &str = "average-rank";

impl From<QuintileTransform> for TransformRepr {
    fn from(t: QuintileTransform) -> Self {
        Self {
            tie_rule: TIE_RULE.to_owned(),
            population: t.population,
            breakpoints: t.breakpoints,
            positions: t.positions,
        }
    }
}

impl TryFrom<TransformRepr> for QuintileTransform {
    type Error = QuintileError;

    fn try_from(r: TransformRepr) -> Result<Self, Self::Error> {
        if r.tie_rule != TIE_RULE {
            return Err(QuintileError::Malformed("unsupported tie rule"));
        }
        if r.breakpoints.len() != r.positions.len() {
            return Err(QuintileError::Malformed("breakpoint/position length mismatch"));
        }
        if r.breakpoints.len() < 2 {
            return Err(QuintileError::DegeneratePopulation {
                distinct: r.breakpoints.len(),
            });
        }
        let increasing = |xs: &[f64]| xs.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&r.breakpoints) || !increasing(&r.positions) {
            return Err(QuintileError::Malformed("breakpoints and positions must increase"));
        }
        if r.breakpoints.iter().any(|v| !v.is_finite())
            || r.positions.iter().any(|p| !(0.0..=1.0).contains(p))
        {
            return Err(QuintileError::Malformed("values out of range"));
        }
        Ok(Self {
            breakpoints: r.breakpoints,
            positions: r.positions,
            population: r.population,
        })
    }
}

/// Fits the transform on a reference population.
pub fn fit_quintile(reference: &[f64]) -> Result<QuintileTransform, QuintileError> {
    if let Some((index, &value)) = reference.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(QuintileError::NonFinite { index, value });
    }
    let mut sorted = reference.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();

    let mut breakpoints = Vec::new();
    let mut positions = Vec::new();
    let mut start = 0;
    while start < n {
        let v = sorted[start];
        let end = start + sorted[start..].partition_point(|&x| x == v);
        // 1-based ranks start+1 ..= end, averaged.
        let avg_rank = (start + 1 + end) as f64 / 2.0;
        breakpoints.push(v);
        positions.push((avg_rank - 0.5) / n as f64);
        start = end;
    }
    if breakpoints.len() < 2 {
        return Err(QuintileError::DegeneratePopulation {
            distinct: breakpoints.len(),
        });
    }
    Ok(QuintileTransform {
        breakpoints,
        positions,
        population: n,
    })
}

impl QuintileTransform {
    /// Distinct reference values in increasing order.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn population(&self) -> usize {
        self.population
    }

    /// Maps a single value.
    pub fn transform(&self, value: f64) -> f64 {
        let bp = &self.breakpoints;
        if value < bp[0] {
            return 0.0;
        }
        if value > bp[bp.len() - 1] {
            return 1.0;
        }
        // First breakpoint >= value.
        let hi = bp.partition_point(|&b| b < value);
        if bp[hi] == value {
            return self.positions[hi];
        }
        let lo = hi - 1;
        let t = (value - bp[lo]) / (bp[hi] - bp[lo]);
        self.positions[lo] + t * (self.positions[hi] - self.positions[lo])
    }

    /// Applies the transform to every unmasked pixel; nodata propagates.
    pub fn apply(&self, r: &Raster) -> Raster {
        r.map(|v| self.transform(v))
    }
}

/// Free-function form of [`QuintileTransform::apply`].
pub fn apply_quintile(t: &QuintileTransform, r: &Raster) -> Raster {
    t.apply(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distinct_population_positions() {
        let t = fit_quintile(&[10.0, 20.0, 30.0, 40.0]).unwrap();
        assert_eq!(t.transform(10.0), 0.125);
        assert_eq!(t.transform(40.0), 0.875);
        assert_eq!(t.transform(25.0), 0.5);
    }

    #[test]
    fn ties_take_average_rank() {
        // Ranks 1..=4 average to 2.5, giving (2.5 - 0.5) / 5.
        let t = fit_quintile(&[5.0, 5.0, 5.0, 5.0, 9.0]).unwrap();
        assert_eq!(t.transform(5.0), 0.4);
        assert_eq!(t.transform(9.0), 0.9);
    }

    #[test]
    fn clamps_outside_reference() {
        let t = fit_quintile(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(t.transform(0.5), 0.0);
        assert_eq!(t.transform(-1e300), 0.0);
        assert_eq!(t.transform(3.5), 1.0);
    }

    #[test]
    fn degenerate_population() {
        assert_eq!(
            fit_quintile(&[2.0, 2.0, 2.0]),
            Err(QuintileError::DegeneratePopulation { distinct: 1 })
        );
        assert!(matches!(fit_quintile(&[]), Err(QuintileError::DegeneratePopulation { .. })));
        assert!(matches!(
            fit_quintile(&[1.0, f64::NAN]),
            Err(QuintileError::NonFinite { index: 1, .. })
        ));
    }

    #[test]
    fn nodata_propagates() {
        let t = fit_quintile(&[0.0, 1.0]).unwrap();
        let r = Raster::with_nodata(2, 1, vec![0.0, f64::NAN], vec![false, true]).unwrap();
        let out = t.apply(&r);
        assert_eq!(out.nodata(), r.nodata());
        assert_eq!(out.values()[0], 0.25);
    }

    #[test]
    fn serde_roundtrip_and_validation() {
        let t = fit_quintile(&[3.0, 1.0, 2.0, 2.0]).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(serde_json::from_str::<QuintileTransform>(&json).unwrap(), t);
        let bad = json.replace("average-rank", "dense");
        assert!(serde_json::from_str::<QuintileTransform>(&bad).is_err());
    }

    #[test]
    fn large_distinct_population_has_mean_one_half() {
        let values: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 * 0.37).collect();
        let t = fit_quintile(&values).unwrap();
        let mean = values.iter().map(|&v| t.transform(v)).sum::<f64>() / 1000.0;
        assert!((mean - 0.5).abs() < 0.01);
    }

    proptest! {
        #[test]
        fn monotone_and_bounded(
            reference in prop::collection::vec(-100.0f64..100.0, 2..64),
            a in -150.0f64..150.0,
            b in -150.0f64..150.0,
        ) {
            prop_assume!(reference.iter().any(|&v| v != reference[0]));
            let t = fit_quintile(&reference).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let (tl, th) = (t.transform(lo), t.transform(hi));
            prop_assert!((0.0..=1.0).contains(&tl));
            prop_assert!((0.0..=1.0).contains(&th));
            prop_assert!(tl <= th);
        }

        #[test]
        fn strictly_increasing_input_maps_strictly_increasing(
            mut reference in prop::collection::btree_set(-1000i32..1000, 2..64)
                .prop_map(|s| s.into_iter().map(f64::from).collect::<Vec<_>>())
        ) {
            let t = fit_quintile(&reference).unwrap();
            reference.sort_by(f64::total_cmp);
            let out: Vec<f64> = reference.iter().map(|&v| t.transform(v)).collect();
            prop_assert!(out.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
