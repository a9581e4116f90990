use serde::{Deserialize, Serialize};

use super::MetricError;

/// A predicted and a ground-truth ordinal class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrdinalPair {
    pub predicted: u8,
    pub actual: u8,
}

impl OrdinalPair {
    pub fn new(predicted: u8, actual: u8) -> Self {
        Self { predicted, actual }
    }
}

/// Quadratic weighted kappa over `k` ordinal classes.
///
/// `kappa = 1 - sum (i-j)^2 O_ij / sum (i-j)^2 E_ij` with observed counts `O`
/// (rows = predicted) and `E_ij = row_i * col_j / N`. When the expected
/// disagreement is zero, agreement is perfect by construction and 1 is
/// returned.
pub fn qwk(pairs: &[OrdinalPair], k: usize) -> Result<f64, MetricError> {
    if pairs.is_empty() {
        return Err(MetricError::Empty("ordinal pairs"));
    }
    let mut observed = vec![0u64; k * k];
    let mut rows = vec![0u64; k];
    let mut cols = vec![0u64; k];
    for (index, p) in pairs.iter().enumerate() {
        for value in [p.predicted, p.actual] {
            if usize::from(value) >= k {
                return Err(MetricError::InvalidLabel { index, value, k });
            }
        }
        let (i, j) = (usize::from(p.predicted), usize::from(p.actual));
        observed[i * k + j] += 1;
        rows[i] += 1;
        cols[j] += 1;
    }
    let n = pairs.len() as f64;
    let weight = |i: usize, j: usize| {
        let d = i as f64 - j as f64;
        d * d
    };
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..k {
        for j in 0..k {
            let w = weight(i, j);
            num += w * observed[i * k + j] as f64;
            den += w * (rows[i] as f64 * cols[j] as f64 / n);
        }
    }
    if den == 0.0 {
        return if num == 0.0 {
            Ok(1.0)
        } else {
            Err(MetricError::UndefinedKappa)
        };
    }
    Ok(1.0 - num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use firescope_testkit as tk;
    use proptest::prelude::*;
    use rand::Rng;

    fn pairs(raw: &[(u8, u8)]) -> Vec<OrdinalPair> {
        raw.iter().map(|&(p, a)| OrdinalPair::new(p, a)).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(qwk(&pairs(&[(1, 1), (4, 4), (9, 9)]), 10).unwrap(), 1.0);
        assert_eq!(qwk(&pairs(&[(9, 0), (0, 9)]), 10).unwrap(), -1.0);
        assert_eq!(qwk(&pairs(&[(5, 1), (5, 3), (5, 8)]), 10).unwrap(), 0.0);
        // Single class for both raters: perfect by definition.
        assert_eq!(qwk(&pairs(&[(3, 3), (3, 3)]), 10).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert_eq!(qwk(&[], 10), Err(MetricError::Empty("ordinal pairs")));
        assert_eq!(
            qwk(&pairs(&[(1, 1), (2, 10)]), 10),
            Err(MetricError::InvalidLabel { index: 1, value: 10, k: 10 })
        );
    }

    #[test]
    fn matches_matrix_oracle() {
        let mut rng = tk::rng(17);
        for _ in 0..100 {
            let n = rng.random_range(2..200);
            let raw: Vec<(usize, usize)> =
                (0..n).map(|_| (rng.random_range(0..10), rng.random_range(0..10))).collect();
            let ps: Vec<_> = raw.iter().map(|&(p, a)| OrdinalPair::new(p as u8, a as u8)).collect();
            let got = qwk(&ps, 10).unwrap();
            assert!((got - tk::qwk_matrices(&raw, 10)).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn bounded_and_permutation_invariant(
            raw in prop::collection::vec((0u8..10, 0u8..10), 1..80),
            seed in any::<u64>(),
        ) {
            let ps = pairs(&raw);
            if let Ok(k) = qwk(&ps, 10) {
                prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&k));
                let mut shuffled = ps.clone();
                use rand::seq::SliceRandom;
                shuffled.shuffle(&mut tk::rng(seed));
                prop_assert_eq!(qwk(&shuffled, 10).unwrap(), k);
            }
        }
    }
}
