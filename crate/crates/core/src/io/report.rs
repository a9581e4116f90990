//! Metric report document and its JSON and CSV renderings.

use serde::{Deserialize, Serialize};

use super::FormatError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdBlock {
    pub mse: f64,
    pub mae: f64,
    pub ssim: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OodEventBlock {
    pub brier: f64,
    pub roc_auc: f64,
    pub ece: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OodPixelBlock {
    pub roc_auc: f64,
    /// Pooled over all event-tile pixels.
    pub iou: f64,
    /// Mean of per-tile values.
    pub iou_macro: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrdinalBlock {
    pub qwk: f64,
    pub brier: f64,
    pub mae: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockCounts {
    pub id_tiles: usize,
    pub event_tiles: usize,
    pub control_tiles: usize,
    pub positive_pixels: usize,
    pub negative_pixels: usize,
    pub background_pixels: usize,
    pub ordinal_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub seed: u64,
    /// SHA-256 of the canonical evaluation config.
    pub config_hash: String,
    pub tool_version: String,
    pub counts: BlockCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricReport {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id_block: Option<IdBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ood_event_block: Option<OodEventBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ood_pixel_block: Option<OodPixelBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ordinal_block: Option<OrdinalBlock>,
    pub provenance: Provenance,
}

impl MetricReport {
    /// `(block, metric, value)` for every reported number, in document order.
    pub fn rows(&self) -> Vec<(&'static str, &'static str, f64)> {
        let mut rows = Vec::new();
        if let Some(b) = &self.id_block {
            rows.extend([("id_block", "mse", b.mse), ("id_block", "mae", b.mae), ("id_block", "ssim", b.ssim)]);
        }
        if let Some(b) = &self.ood_event_block {
            rows.extend([
                ("ood_event_block", "brier", b.brier),
                ("ood_event_block", "roc_auc", b.roc_auc),
                ("ood_event_block", "ece", b.ece),
            ]);
        }
        if let Some(b) = &self.ood_pixel_block {
            rows.extend([
                ("ood_pixel_block", "roc_auc", b.roc_auc),
                ("ood_pixel_block", "iou", b.iou),
                ("ood_pixel_block", "iou_macro", b.iou_macro),
            ]);
        }
        if let Some(b) = &self.ordinal_block {
            rows.extend([
                ("ordinal_block", "qwk", b.qwk),
                ("ordinal_block", "brier", b.brier),
                ("ordinal_block", "mae", b.mae),
            ]);
        }
        rows
    }

    pub fn validate(&self) -> Result<(), FormatError> {
        if self.schema_version != REPORT_SCHEMA_VERSION {
            return Err(FormatError::new(
                "schema_version",
                format!("unsupported version {}", self.schema_version),
            ));
        }
        for (block, metric, v) in self.rows() {
            if !v.is_finite() {
                return Err(FormatError::new(format!("{block}.{metric}"), format!("non-finite value {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

/// Renders a report. JSON keeps the field order of [`MetricReport`]; CSV has
/// a `block,metric,value` header and one row per block metric.
pub fn emit_report(report: &MetricReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["block", "metric", "value"]).expect("in-memory write");
            for (block, metric, v) in report.rows() {
                w.serialize((block, metric, v)).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
        }
    }
}

pub fn parse_report(text: &str) -> Result<MetricReport, FormatError> {
    let r: MetricReport = serde_json::from_str(text).map_err(|e| FormatError::new("report", e.to_string()))?;
    r.validate()?;
    Ok(r)
}

/// One point of an ROC curve or one reliability bin.
///
/// For ROC rows `param` is the threshold, `x` the false positive rate and
/// `y` the true positive rate. For reliability rows `param` is the lower bin
/// edge, `x` the mean confidence and `y` the observed frequency; both are
/// empty for an empty bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub curve: String,
    pub param: f64,
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub count: Option<usize>,
}

pub fn emit_curves(rows: &[CurveRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    // A header is written with the first row; keep it for an empty table too.
    if rows.is_empty() {
        w.write_record(["curve", "param", "x", "y", "count"]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}
