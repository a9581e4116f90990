use serde::{Deserialize, Serialize};

use super::TrainingError;
use crate::numeric::{self, CompensatedSum};

/// Groups whose reward standard deviation falls below this get zero advantages.
pub const ZERO_STD_THRESHOLD: f64 = 1e-8;

/// One sampled group: per-rollout rewards and sequence log-probabilities under
/// the current, sampling and frozen reference policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RolloutGroup {
    pub rewards: Vec<f64>,
    pub logp_new: Vec<f64>,
    pub logp_old: Vec<f64>,
    pub logp_ref: Vec<f64>,
}

impl RolloutGroup {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn validate(&self) -> Result<(), TrainingError> {
        let n = self.rewards.len();
        if n < 2 {
            return Err(TrainingError::GroupTooSmall(n));
        }
        let fields: [(&'static str, &[f64]); 4] = [
            ("rewards", &self.rewards),
            ("logp_new", &self.logp_new),
            ("logp_old", &self.logp_old),
            ("logp_ref", &self.logp_ref),
        ];
        for (field, values) in fields {
            if values.len() != n {
                return Err(TrainingError::RaggedGroup {
                    field,
                    expected: n,
                    actual: values.len(),
                });
            }
            if let Some(index) = values.iter().position(|v| !v.is_finite()) {
                return Err(TrainingError::NonFinite { field, index });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrpoConfig {
    /// Ratio clipping half-width.
    pub clip_epsilon: f64,
    /// KL penalty coefficient.
    pub kl_coeff: f64,
}

impl Default for GrpoConfig {
    fn default() -> Self {
        Self {
            clip_epsilon: 0.2,
            kl_coeff: 0.01,
        }
    }
}

impl GrpoConfig {
    pub fn validate(&self) -> Result<(), TrainingError> {
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 1.0) {
            return Err(TrainingError::GrpoConfig(format!(
                "clip_epsilon must lie in (0, 1), got {}",
                self.clip_epsilon
            )));
        }
        if !(self.kl_coeff >= 0.0 && self.kl_coeff.is_finite()) {
            return Err(TrainingError::GrpoConfig(format!(
                "kl_coeff must be non-negative, got {}",
                self.kl_coeff
            )));
        }
        Ok(())
    }
}

/// Group-normalized advantages `(r_i - mean) / std` with the population
/// standard deviation. Uniform groups yield all zeros.
pub fn group_advantages(rewards: &[f64]) -> Result<Vec<f64>, TrainingError> {
    if rewards.len() < 2 {
        return Err(TrainingError::GroupTooSmall(rewards.len()));
    }
    if let Some(index) = rewards.iter().position(|v| !v.is_finite()) {
        return Err(TrainingError::NonFinite { field: "rewards", index });
    }
    let n = rewards.len() as f64;
    let mean = numeric::sum(rewards.iter().copied()) / n;
    let var = numeric::sum(rewards.iter().map(|r| (r - mean) * (r - mean))) / n;
    let std = var.sqrt();
    if std < ZERO_STD_THRESHOLD {
        return Ok(vec![0.0; rewards.len()]);
    }
    Ok(rewards.iter().map(|r| (r - mean) / std).collect())
}

/// Clipped surrogate `min(d A, clip(d, 1-eps, 1+eps) A)` with the
/// probability ratio `d = exp(logp_new - logp_old)`.
pub fn clipped_term(logp_new: f64, logp_old: f64, advantage: f64, eps: f64) -> f64 {
    let ratio = (logp_new - logp_old).exp();
    let clipped = ratio.clamp(1.0 - eps, 1.0 + eps);
    (ratio * advantage).min(clipped * advantage)
}

/// Sample estimate of `KL(policy || reference)`: the mean log-ratio.
pub fn kl_estimate(logp_new: &[f64], logp_ref: &[f64]) -> Result<f64, TrainingError> {
    if logp_new.len() != logp_ref.len() {
        return Err(TrainingError::LengthMismatch {
            left: logp_new.len(),
            right: logp_ref.len(),
        });
    }
    if logp_new.is_empty() {
        return Err(TrainingError::Empty("log-probabilities"));
    }
    Ok(numeric::sum(logp_new.iter().zip(logp_ref).map(|(a, b)| a - b)) / logp_new.len() as f64)
}

/// Per-group objective value: mean clipped surrogate minus the KL penalty.
fn group_objective(g: &RolloutGroup, cfg: &GrpoConfig) -> Result<f64, TrainingError> {
    g.validate()?;
    let adv = group_advantages(&g.rewards)?;
    let surrogate = numeric::sum(
        (0..g.len()).map(|i| clipped_term(g.logp_new[i], g.logp_old[i], adv[i], cfg.clip_epsilon)),
    ) / g.len() as f64;
    Ok(surrogate - cfg.kl_coeff * kl_estimate(&g.logp_new, &g.logp_ref)?)
}

/// GRPO objective (to be maximized), averaged over groups in order.
pub fn grpo_objective(groups: &[RolloutGroup], cfg: &GrpoConfig) -> Result<f64, TrainingError> {
    cfg.validate()?;
    if groups.is_empty() {
        return Err(TrainingError::Empty("group list"));
    }
    let mut acc = CompensatedSum::new();
    for g in groups {
        acc.add(group_objective(g, cfg)?);
    }
    Ok(acc.total() / groups.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use firescope_testkit as tk;

    #[test]
    fn advantage_examples() {
        assert_eq!(group_advantages(&[0.0, 1.0]).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(group_advantages(&[0.3, 0.3, 0.3]).unwrap(), vec![0.0; 3]);
        let a = group_advantages(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let expected = [-1.3416, -0.4472, 0.4472, 1.3416];
        for (x, e) in a.iter().zip(expected) {
            assert!((x - e).abs() < 1e-4);
        }
        assert_eq!(group_advantages(&[1.0]), Err(TrainingError::GroupTooSmall(1)));
    }

    #[test]
    fn clipped_term_examples() {
        assert_eq!(clipped_term(-3.0, -3.0, 2.0, 0.2), 2.0);
        let ln15 = 1.5f64.ln();
        assert!((clipped_term(ln15, 0.0, 1.0, 0.2) - 1.2).abs() < 1e-12);
        let ln05 = 0.5f64.ln();
        assert!((clipped_term(ln05, 0.0, -1.0, 0.2) + 0.8).abs() < 1e-12);
    }

    #[test]
    fn kl_examples() {
        let a = [-1.0, -2.5, -0.3];
        assert_eq!(kl_estimate(&a, &a).unwrap(), 0.0);
        let shifted: Vec<f64> = a.iter().map(|x| x - 0.25).collect();
        assert!((kl_estimate(&a, &shifted).unwrap() - 0.25).abs() < 1e-15);
        let mut rng = tk::rng(2);
        let x = tk::uniform(&mut rng, 50, -5.0, 0.0);
        let y = tk::uniform(&mut rng, 50, -5.0, 0.0);
        let diffs: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
        assert!((kl_estimate(&x, &y).unwrap() - tk::mean_loop(&diffs)).abs() < 1e-12);
        assert_eq!(kl_estimate(&[], &[]), Err(TrainingError::Empty("log-probabilities")));
        assert!(matches!(kl_estimate(&[1.0], &[]), Err(TrainingError::LengthMismatch { .. })));
    }

    #[test]
    fn objective_examples() {
        let cfg = GrpoConfig::default();
        let flat = RolloutGroup {
            rewards: vec![0.5; 4],
            logp_new: vec![-2.0; 4],
            logp_old: vec![-2.0; 4],
            logp_ref: vec![-2.0; 4],
        };
        assert_eq!(grpo_objective(&[flat.clone(), flat], &cfg).unwrap(), 0.0);

        // Rewards [0, 1] give advantages [-1, 1]. Rollout 0 has ratio 0.5,
        // rollout 1 ratio 1.5; with eps = 0.2 the clipped terms are -0.8 and
        // 1.2, so the surrogate is 0.2. KL = mean([ln 0.5, ln 1.5]) against a
        // reference equal to the sampling policy.
        let g = RolloutGroup {
            rewards: vec![0.0, 1.0],
            logp_new: vec![0.5f64.ln(), 1.5f64.ln()],
            logp_old: vec![0.0, 0.0],
            logp_ref: vec![0.0, 0.0],
        };
        let kl = (0.5f64.ln() + 1.5f64.ln()) / 2.0;
        let expected = 0.2 - 0.01 * kl;
        assert!((grpo_objective(&[g.clone()], &cfg).unwrap() - expected).abs() < 1e-12);

        let no_kl = GrpoConfig { kl_coeff: 0.0, ..cfg };
        assert!((grpo_objective(&[g], &no_kl).unwrap() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn objective_errors() {
        let cfg = GrpoConfig::default();
        assert_eq!(grpo_objective(&[], &cfg), Err(TrainingError::Empty("group list")));
        let ragged = RolloutGroup {
            rewards: vec![0.0, 1.0],
            logp_new: vec![0.0],
            logp_old: vec![0.0, 0.0],
            logp_ref: vec![0.0, 0.0],
        };
        assert!(matches!(
            grpo_objective(&[ragged], &cfg),
            Err(TrainingError::RaggedGroup { field: "logp_new", .. })
        ));
        let bad = GrpoConfig { clip_epsilon: 1.0, ..cfg };
        assert!(matches!(bad.validate(), Err(TrainingError::GrpoConfig(_))));
    }
}
