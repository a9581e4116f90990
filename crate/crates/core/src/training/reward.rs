use serde::{Deserialize, Serialize};

use super::TrainingError;
use crate::raster::ORDINAL_CLASSES;

const MARKER: &str = "FINAL ANSWER:";

/// Parsed oracle response.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleAnswer {
    /// Present exactly when `format_ok` is true.
    pub digit: Option<u8>,
    pub format_ok: bool,
}

/// Parses the trailing `FINAL ANSWER:` block of an oracle response.
///
/// The response is well-formed when its last two non-blank lines are the
/// marker line `FINAL ANSWER:` and a line holding a single digit 0-9.
/// Surrounding whitespace on either line is ignored.
pub fn parse_oracle_output(text: &str) -> OracleAnswer {
    const BAD: OracleAnswer = OracleAnswer {
        digit: None,
        format_ok: false,
    };
    let mut lines = text.lines().rev().map(str::trim).filter(|l| !l.is_empty());
    let (Some(answer), Some(marker)) = (lines.next(), lines.next()) else {
        return BAD;
    };
    if marker != MARKER {
        return BAD;
    }
    match answer.as_bytes() {
        [d @ b'0'..=b'9'] => OracleAnswer {
            digit: Some(d - b'0'),
            format_ok: true,
        },
        _ => BAD,
    }
}

/// Reward weights and optional training label histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub acc_weight: f64,
    pub fmt_weight: f64,
    /// Training label counts per ordinal class; `None` means uniform.
    pub class_frequencies: Option<[u64; ORDINAL_CLASSES]>,
}

impl Default for RewardConfig {
    fn default() -> Self {
        Self {
            acc_weight: 0.9,
            fmt_weight: 0.1,
            class_frequencies: None,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), TrainingError> {
        let (a, f) = (self.acc_weight, self.fmt_weight);
        if !(a >= 0.0 && f >= 0.0) || (a + f - 1.0).abs() > 1e-9 {
            return Err(TrainingError::RewardConfig(format!(
                "weights must be non-negative and sum to 1, got {a} + {f}"
            )));
        }
        if let Some(freq) = &self.class_frequencies {
            if let Some(c) = freq.iter().position(|&n| n == 0) {
                return Err(TrainingError::RewardConfig(format!(
                    "class {c} has zero frequency"
                )));
            }
        }
        Ok(())
    }

    /// Inverse-frequency class weight, scaled so the frequency-weighted mean
    /// over classes is 1. Uniform histograms give 1 for every class.
    pub fn class_weight(&self, class: u8) -> f64 {
        match &self.class_frequencies {
            None => 1.0,
            Some(freq) => {
                let total: u64 = freq.iter().sum();
                let share = freq[usize::from(class)] as f64 / total as f64;
                1.0 / (ORDINAL_CLASSES as f64 * share)
            }
        }
    }
}

/// Scalar reward `acc_weight * R_acc + fmt_weight * R_fmt`.
///
/// `R_acc = min(1, w(actual) * (1 - |predicted - actual| / 9))` and 0 when
/// no answer was parsed; `R_fmt` is 1 for a well-formed response.
pub fn reward(
    predicted: Option<u8>,
    actual: u8,
    format_ok: bool,
    cfg: &RewardConfig,
) -> Result<f64, TrainingError> {
    cfg.validate()?;
    let max = (ORDINAL_CLASSES - 1) as u8;
    if actual > max {
        return Err(TrainingError::LabelOutOfRange(actual));
    }
    let r_acc = match predicted {
        None => 0.0,
        Some(p) if p > max => return Err(TrainingError::LabelOutOfRange(p)),
        Some(p) => {
            let credit = 1.0 - f64::from(p.abs_diff(actual)) / f64::from(max);
            (cfg.class_weight(actual) * credit).min(1.0)
        }
    };
    let r_fmt = if format_ok { 1.0 } else { 0.0 };
    Ok(cfg.acc_weight * r_acc + cfg.fmt_weight * r_fmt)
}
