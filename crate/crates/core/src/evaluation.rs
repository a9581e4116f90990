//! Batch evaluation of a manifest into a [`MetricReport`].
//!
//! Tiles are loaded and scored on a worker pool, then every reduction runs
//! sequentially in tile-id order, so the report does not depend on the
//! number of workers.

use std::collections::BTreeSet;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dataset::ClimateVector;
use crate::io::{
    load_mask, load_raster, read_file, BlockCounts, CurveRow, EvalManifest, FormatError, IdBlock, IoError,
    MetricReport, OodEventBlock, OodPixelBlock, OrdinalBlock, Provenance, TileRecord, TileRole,
    REPORT_SCHEMA_VERSION,
};
use crate::metrics::{
    assemble_pixel_eval, brier, ece, mae, mse, qwk, reliability_bins, roc_auc, roc_curve, ssim, ConfusionCounts,
    MetricError, OodRole, OodTile, OrdinalPair, SsimParams,
};
use crate::numeric::CompensatedSum;
use crate::raster::{discretize_mean_risk, BinaryMask, Raster, ORDINAL_CLASSES};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("{block}: {source}")]
    Metric {
        block: &'static str,
        #[source]
        source: MetricError,
    },
    #[error("block {0} was required but the manifest has no inputs for it")]
    MissingBlock(Block),
    #[error("manifest has {present} tiles but no {missing} tiles")]
    Unpaired {
        present: &'static str,
        missing: &'static str,
    },
    #[error("no block could be computed from the manifest")]
    NothingToReport,
    #[error("worker pool: {0}")]
    Pool(String),
}

impl EvalError {
    /// True when the failure came from the file system rather than bad input.
    pub fn is_io(&self) -> bool {
        matches!(self, EvalError::Io(e) if e.is_io())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Id,
    OodEvent,
    OodPixel,
    Ordinal,
}

impl Block {
    pub fn as_str(self) -> &'static str {
        match self {
            Block::Id => "id",
            Block::OodEvent => "ood_event",
            Block::OodPixel => "ood_pixel",
            Block::Ordinal => "ordinal",
        }
    }
}

impl std::fmt::Display for Block {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Block {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "id" => Ok(Block::Id),
            "ood_event" => Ok(Block::OodEvent),
            "ood_pixel" => Ok(Block::OodPixel),
            "ordinal" => Ok(Block::Ordinal),
            _ => Err(format!("unknown block {s:?} (expected id, ood_event, ood_pixel or ordinal)")),
        }
    }
}

/// How a tile's risk raster is pooled into one event probability.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TileScore {
    #[default]
    Mean,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Pixels with predicted risk `>=` this count as burnt for IoU.
    pub threshold: f64,
    pub ece_bins: usize,
    pub ssim: SsimParams,
    pub tile_score: TileScore,
    /// Blocks that must be present; evaluation fails if their inputs are missing.
    pub require: BTreeSet<Block>,
    pub seed: u64,
    /// Worker threads. Does not affect results and is left out of the config hash.
    pub jobs: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            threshold: 0.5,
            ece_bins: 15,
            ssim: SsimParams::default(),
            tile_score: TileScore::Mean,
            require: BTreeSet::new(),
            seed: 0,
            jobs: 1,
        }
    }
}

#[derive(Serialize)]
struct HashedConfig<'a> {
    threshold: f64,
    ece_bins: usize,
    ssim: &'a SsimParams,
    tile_score: TileScore,
    require: &'a BTreeSet<Block>,
    seed: u64,
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(0.0..=1.0).contains(&self.threshold) {
            return Err(EvalError::Config(format!("threshold {} outside [0, 1]", self.threshold)));
        }
        if self.ece_bins == 0 {
            return Err(EvalError::Config("ece_bins must be positive".into()));
        }
        if self.jobs == 0 {
            return Err(EvalError::Config("jobs must be positive".into()));
        }
        self.ssim.validate().map_err(|e| EvalError::Config(e.to_string()))
    }

    /// Hex SHA-256 of the canonical JSON form of every result-affecting field.
    pub fn hash(&self) -> String {
        let view = HashedConfig {
            threshold: self.threshold,
            ece_bins: self.ece_bins,
            ssim: &self.ssim,
            tile_score: self.tile_score,
            require: &self.require,
            seed: self.seed,
        };
        let bytes = serde_json::to_vec(&view).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}

enum Outcome {
    Id {
        mse: f64,
        mae: f64,
        ssim: f64,
        ordinal: Option<(OrdinalPair, f64)>,
    },
    Event {
        score: f64,
        counts: ConfusionCounts,
        prediction: Raster,
        mask: BinaryMask,
    },
    Control {
        score: f64,
        prediction: Raster,
    },
}

fn load_probability_raster(path: &Path) -> Result<Raster, EvalError> {
    let r = load_raster(path)?;
    if let Some((i, v)) = r.valid().find(|(_, v)| !(0.0..=1.0).contains(v)) {
        return Err(IoError::Format {
            path: path.to_path_buf(),
            source: FormatError::new(format!("payload[{i}]"), format!("risk value {v} outside [0, 1]")),
        }
        .into());
    }
    Ok(r)
}

fn check_dims(reference: &Raster, other_w: usize, other_h: usize, path: &Path) -> Result<(), EvalError> {
    let field = if other_w != reference.width() {
        "width"
    } else if other_h != reference.height() {
        "height"
    } else {
        return Ok(());
    };
    Err(IoError::Format {
        path: path.to_path_buf(),
        source: FormatError::new(
            field,
            format!(
                "{other_w}x{other_h} does not match prediction {}x{}",
                reference.width(),
                reference.height()
            ),
        ),
    }
    .into())
}

fn metric(block: &'static str) -> impl Fn(MetricError) -> EvalError {
    move |source| EvalError::Metric { block, source }
}

fn tile_score(r: &Raster, how: TileScore) -> Result<f64, EvalError> {
    let score = match how {
        TileScore::Mean => r.mean(),
        TileScore::Max => r.max(),
    };
    score.map_err(|e| metric("ood_event_block")(e.into()))
}

fn score_tile(e: &TileRecord, cfg: &EvalConfig) -> Result<Outcome, EvalError> {
    if let Some(p) = &e.climate_path {
        let bytes = read_file(p)?;
        serde_json::from_slice::<ClimateVector>(&bytes)
            .map_err(|err| IoError::format(p, FormatError::new("climate", err.to_string())))?;
    }
    let pred = load_probability_raster(&e.prediction_path)?;
    match e.role {
        TileRole::IdTest => {
            let tp = e.target_path.as_deref().expect("validated manifest");
            let target = load_probability_raster(tp)?;
            check_dims(&pred, target.width(), target.height(), tp)?;
            let m = metric("id_block");
            let ordinal = match e.oracle_label {
                Some(label) => {
                    let actual = discretize_mean_risk(&target).map_err(|err| m(err.into()))?;
                    let mean = target.mean().map_err(|err| m(err.into()))?;
                    Some((OrdinalPair::new(label, actual), mean))
                }
                None => None,
            };
            Ok(Outcome::Id {
                mse: mse(&target, &pred).map_err(&m)?,
                mae: mae(&target, &pred).map_err(&m)?,
                ssim: ssim(&target, &pred, &cfg.ssim).map_err(&m)?,
                ordinal,
            })
        }
        TileRole::OodEvent => {
            let mp = e.mask_path.as_deref().expect("validated manifest");
            let mask = load_mask(mp)?;
            check_dims(&pred, mask.width(), mask.height(), mp)?;
            let counts = ConfusionCounts::from_prediction(&pred, &mask, cfg.threshold)
                .map_err(metric("ood_pixel_block"))?;
            Ok(Outcome::Event {
                score: tile_score(&pred, cfg.tile_score)?,
                counts,
                prediction: pred,
                mask,
            })
        }
        TileRole::OodControl => Ok(Outcome::Control {
            score: tile_score(&pred, cfg.tile_score)?,
            prediction: pred,
        }),
    }
}

fn mean_of(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for v in values {
        acc.add(v);
        n += 1;
    }
    acc.total() / n as f64
}

/// Evaluates every tile in `manifest` and assembles the report.
pub fn run_evaluation(manifest: &EvalManifest, cfg: &EvalConfig) -> Result<MetricReport, EvalError> {
    evaluate(manifest, cfg, false).map(|(r, _)| r)
}

/// Like [`run_evaluation`], also returning ROC and reliability curve rows.
pub fn run_evaluation_with_curves(
    manifest: &EvalManifest,
    cfg: &EvalConfig,
) -> Result<(MetricReport, Vec<CurveRow>), EvalError> {
    evaluate(manifest, cfg, true)
}

fn evaluate(
    manifest: &EvalManifest,
    cfg: &EvalConfig,
    want_curves: bool,
) -> Result<(MetricReport, Vec<CurveRow>), EvalError> {
    cfg.validate()?;
    manifest
        .validate()
        .map_err(|e| IoError::format(Path::new("<manifest>"), e))?;

    let mut entries: Vec<&TileRecord> = manifest.entries.iter().collect();
    entries.sort_by(|a, b| a.tile_id.cmp(&b.tile_id));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| EvalError::Pool(e.to_string()))?;
    let results: Vec<Result<Outcome, EvalError>> =
        pool.install(|| entries.par_iter().map(|e| score_tile(e, cfg)).collect());
    let mut outcomes = Vec::with_capacity(results.len());
    for r in results {
        outcomes.push(r?);
    }

    let mut counts = BlockCounts::default();
    let mut curves = Vec::new();

    // In-distribution reconstruction.
    let mut id = Vec::new();
    let mut ordinal = Vec::new();
    for o in &outcomes {
        if let Outcome::Id {
            mse,
            mae,
            ssim,
            ordinal: ord,
        } = o
        {
            id.push((*mse, *mae, *ssim));
            if let Some(pair) = ord {
                ordinal.push(*pair);
            }
        }
    }
    counts.id_tiles = id.len();
    let id_block = (!id.is_empty()).then(|| IdBlock {
        mse: mean_of(id.iter().map(|t| t.0)),
        mae: mean_of(id.iter().map(|t| t.1)),
        ssim: mean_of(id.iter().map(|t| t.2)),
    });

    counts.ordinal_pairs = ordinal.len();
    let ordinal_block = if ordinal.is_empty() {
        None
    } else {
        let pairs: Vec<OrdinalPair> = ordinal.iter().map(|(p, _)| *p).collect();
        let centre = |label: u8| (f64::from(label) + 0.5) / ORDINAL_CLASSES as f64;
        Some(OrdinalBlock {
            qwk: qwk(&pairs, ORDINAL_CLASSES).map_err(metric("ordinal_block"))?,
            brier: mean_of(ordinal.iter().map(|(p, m)| (centre(p.predicted) - m).powi(2))),
            mae: mean_of(ordinal.iter().map(|(p, m)| (centre(p.predicted) - m).abs())),
        })
    };

    // Out-of-distribution event discrimination.
    let mut probs = Vec::new();
    let mut labels = Vec::new();
    let (mut event_scores, mut control_scores) = (Vec::new(), Vec::new());
    let mut ood_tiles = Vec::new();
    let mut micro = ConfusionCounts::default();
    let mut per_tile_iou = Vec::new();
    for (e, o) in entries.iter().zip(&outcomes) {
        match o {
            Outcome::Event {
                score,
                counts: c,
                prediction,
                mask,
            } => {
                probs.push(*score);
                labels.push(true);
                event_scores.push(*score);
                micro = micro + *c;
                per_tile_iou.push(c.iou());
                ood_tiles.push(OodTile {
                    tile_id: &e.tile_id,
                    role: OodRole::Event,
                    prediction,
                    mask: Some(mask),
                });
            }
            Outcome::Control { score, prediction } => {
                probs.push(*score);
                labels.push(false);
                control_scores.push(*score);
                ood_tiles.push(OodTile {
                    tile_id: &e.tile_id,
                    role: OodRole::Control,
                    prediction,
                    mask: None,
                });
            }
            Outcome::Id { .. } => {}
        }
    }
    counts.event_tiles = event_scores.len();
    counts.control_tiles = control_scores.len();
    match (event_scores.is_empty(), control_scores.is_empty()) {
        (false, true) => {
            return Err(EvalError::Unpaired {
                present: "ood_event",
                missing: "ood_control",
            })
        }
        (true, false) => {
            return Err(EvalError::Unpaired {
                present: "ood_control",
                missing: "ood_event",
            })
        }
        _ => {}
    }

    let (ood_event_block, ood_pixel_block) = if ood_tiles.is_empty() {
        (None, None)
    } else {
        let m = metric("ood_event_block");
        let event_block = OodEventBlock {
            brier: brier(&probs, &labels).map_err(&m)?,
            roc_auc: roc_auc(&event_scores, &control_scores).map_err(&m)?,
            ece: ece(&probs, &labels, cfg.ece_bins).map_err(&m)?,
        };
        let pixels = assemble_pixel_eval(&ood_tiles).map_err(metric("ood_pixel_block"))?;
        counts.positive_pixels = pixels.positive_scores.len();
        counts.negative_pixels = pixels.negative_scores.len();
        counts.background_pixels = pixels.background_scores.len();
        let pixel_block = OodPixelBlock {
            roc_auc: roc_auc(&pixels.positive_scores, &pixels.negative_scores)
                .map_err(metric("ood_pixel_block"))?,
            iou: micro.iou(),
            iou_macro: mean_of(per_tile_iou.iter().copied()),
        };
        if want_curves {
            let tile_roc = roc_curve(&event_scores, &control_scores).map_err(&m)?;
            let pixel_roc = roc_curve(&pixels.positive_scores, &pixels.negative_scores)
                .map_err(metric("ood_pixel_block"))?;
            for (name, points) in [("roc_event", tile_roc), ("roc_pixel", pixel_roc)] {
                curves.extend(points.into_iter().map(|p| CurveRow {
                    curve: name.into(),
                    param: p.threshold,
                    x: Some(p.fpr),
                    y: Some(p.tpr),
                    count: None,
                }));
            }
            let bins = reliability_bins(&probs, &labels, cfg.ece_bins).map_err(&m)?;
            curves.extend(bins.into_iter().map(|b| CurveRow {
                curve: "reliability_event".into(),
                param: b.lower,
                x: b.confidence,
                y: b.frequency,
                count: Some(b.count),
            }));
        }
        (Some(event_block), Some(pixel_block))
    };

    let present = [
        (Block::Id, id_block.is_some()),
        (Block::OodEvent, ood_event_block.is_some()),
        (Block::OodPixel, ood_pixel_block.is_some()),
        (Block::Ordinal, ordinal_block.is_some()),
    ];
    for (block, ok) in present {
        if !ok && cfg.require.contains(&block) {
            return Err(EvalError::MissingBlock(block));
        }
    }
    if present.iter().all(|(_, ok)| !ok) {
        return Err(EvalError::NothingToReport);
    }

    let report = MetricReport {
        schema_version: REPORT_SCHEMA_VERSION,
        id_block,
        ood_event_block,
        ood_pixel_block,
        ordinal_block,
        provenance: Provenance {
            seed: cfg.seed,
            config_hash: cfg.hash(),
            tool_version: crate::TOOL_VERSION.to_owned(),
            counts,
        },
    };
    report
        .validate()
        .map_err(|e| IoError::format(Path::new("<report>"), e))?;
    Ok((report, curves))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::{save_mask, save_raster};
    use std::path::PathBuf;

    struct Fixture {
        dir: tempfile::TempDir,
        entries: Vec<TileRecord>,
    }

    impl Fixture {
        fn new() -> Self {
            Self {
                dir: tempfile::tempdir().unwrap(),
                entries: Vec::new(),
            }
        }

        fn write(&self, name: &str, r: &Raster) -> PathBuf {
            let p = self.dir.path().join(name);
            save_raster(r, &p).unwrap();
            p
        }

        fn id(&mut self, id: &str, pred: &Raster, target: &Raster, label: Option<u8>) {
            let prediction_path = self.write(&format!("{id}.pred"), pred);
            let target_path = Some(self.write(&format!("{id}.target"), target));
            self.entries.push(TileRecord {
                tile_id: id.into(),
                role: TileRole::IdTest,
                prediction_path,
                target_path,
                mask_path: None,
                climate_path: None,
                year: 2020,
                country: None,
                oracle_label: label,
            });
        }

        fn ood(&mut self, id: &str, pred: &Raster, mask: Option<&BinaryMask>) {
            let prediction_path = self.write(&format!("{id}.pred"), pred);
            let mask_path = mask.map(|m| {
                let p = self.dir.path().join(format!("{id}.mask"));
                save_mask(m, id, &p).unwrap();
                p
            });
            self.entries.push(TileRecord {
                tile_id: id.into(),
                role: if mask.is_some() {
                    TileRole::OodEvent
                } else {
                    TileRole::OodControl
                },
                prediction_path,
                target_path: None,
                mask_path,
                climate_path: None,
                year: 2021,
                country: Some("AU".into()),
                oracle_label: None,
            });
        }

        fn manifest(&self) -> EvalManifest {
            EvalManifest::new(self.entries.clone())
        }
    }

    fn ramp(w: usize, h: usize) -> Raster {
        Raster::from_fn(w, h, |r, c| ((r * w + c) % 17) as f64 / 16.0).unwrap()
    }

    #[test]
    fn identity_tile() {
        let mut f = Fixture::new();
        let y = ramp(16, 16);
        f.id("a", &y, &y, None);
        let r = run_evaluation(&f.manifest(), &EvalConfig::default()).unwrap();
        assert_eq!(r.id_block, Some(IdBlock { mse: 0.0, mae: 0.0, ssim: 1.0 }));
        assert!(r.ood_event_block.is_none() && r.ordinal_block.is_none());
        assert_eq!(r.provenance.counts.id_tiles, 1);
    }

    #[test]
    fn perfect_event_and_control() {
        let mut f = Fixture::new();
        let ones = Raster::filled(4, 4, 1.0).unwrap();
        let zeros = Raster::filled(4, 4, 0.0).unwrap();
        let mask = BinaryMask::new(4, 4, (0..16).map(|i| i < 4).collect()).unwrap();
        f.ood("event", &ones, Some(&mask));
        f.ood("control", &zeros, None);
        let r = run_evaluation(&f.manifest(), &EvalConfig::default()).unwrap();
        let ev = r.ood_event_block.unwrap();
        assert_eq!((ev.brier, ev.roc_auc, ev.ece), (0.0, 1.0, 0.0));
        let px = r.ood_pixel_block.unwrap();
        assert_eq!(px.roc_auc, 1.0);
        // Everything predicted burnt, a quarter actually burnt.
        assert_eq!(px.iou, 0.25);
        let c = r.provenance.counts;
        assert_eq!((c.positive_pixels, c.negative_pixels, c.background_pixels), (4, 16, 12));
    }

    #[test]
    fn deterministic_across_jobs() {
        let mut f = Fixture::new();
        for i in 0..12 {
            let p = Raster::from_fn(12, 12, |r, c| ((r * 31 + c * 7 + i * 13) % 23) as f64 / 22.0).unwrap();
            f.id(&format!("id{i:02}"), &p, &ramp(12, 12), Some((i % 10) as u8));
            let mask = BinaryMask::new(12, 12, (0..144).map(|k| (k + i) % 5 == 0).collect()).unwrap();
            f.ood(&format!("ev{i:02}"), &p, Some(&mask));
            f.ood(&format!("ct{i:02}"), &p.map(|v| v * 0.5), None);
        }
        let m = f.manifest();
        let emit = |jobs| {
            let cfg = EvalConfig {
                jobs,
                ..Default::default()
            };
            crate::io::emit_report(&run_evaluation(&m, &cfg).unwrap(), crate::io::ReportFormat::Json)
        };
        let one = emit(1);
        assert_eq!(one, emit(4));
        assert_eq!(one, emit(8));
        // Manifest order does not matter either.
        let mut rev = m.clone();
        rev.entries.reverse();
        let r = run_evaluation(&rev, &EvalConfig::default()).unwrap();
        assert_eq!(crate::io::emit_report(&r, crate::io::ReportFormat::Json), one);
    }

    #[test]
    fn ordinal_block_from_labels() {
        let mut f = Fixture::new();
        // Dyadic values survive the f32 container exactly.
        let t = Raster::filled(11, 11, 0.375).unwrap();
        f.id("a", &t, &t, Some(3));
        let t2 = Raster::filled(11, 11, 0.9375).unwrap();
        f.id("b", &t2, &t2, Some(9));
        let r = run_evaluation(&f.manifest(), &EvalConfig::default()).unwrap();
        let o = r.ordinal_block.unwrap();
        assert_eq!(o.qwk, 1.0);
        // Bin centres 0.35 and 0.95 against mean risks 0.375 and 0.9375.
        assert!((o.brier - (0.025f64.powi(2) + 0.0125f64.powi(2)) / 2.0).abs() < 1e-15, "{o:?}");
        assert!((o.mae - 0.01875).abs() < 1e-15, "{o:?}");
        assert_eq!(r.provenance.counts.ordinal_pairs, 2);
    }

    #[test]
    fn config_hash_tracks_values_but_not_jobs() {
        let base = EvalConfig::default();
        let h = base.hash();
        assert_eq!(h.len(), 64);
        assert_eq!(EvalConfig { jobs: 8, ..base.clone() }.hash(), h);
        let variants = [
            EvalConfig { threshold: 0.6, ..base.clone() },
            EvalConfig { ece_bins: 10, ..base.clone() },
            EvalConfig { seed: 1, ..base.clone() },
            EvalConfig { tile_score: TileScore::Max, ..base.clone() },
            EvalConfig {
                ssim: SsimParams { sigma: 2.0, ..Default::default() },
                ..base.clone()
            },
            EvalConfig {
                require: [Block::Id].into(),
                ..base.clone()
            },
        ];
        let mut seen = BTreeSet::from([h]);
        for v in variants {
            assert!(seen.insert(v.hash()), "{v:?}");
        }
    }

    #[test]
    fn error_cases() {
        let mut f = Fixture::new();
        let ones = Raster::filled(4, 4, 1.0).unwrap();
        let mask = BinaryMask::new(4, 4, vec![true; 16]).unwrap();
        f.ood("event", &ones, Some(&mask));
        assert!(matches!(
            run_evaluation(&f.manifest(), &EvalConfig::default()),
            Err(EvalError::Unpaired { .. })
        ));

        let mut f = Fixture::new();
        let y = ramp(16, 16);
        f.id("a", &y, &y, None);
        let cfg = EvalConfig {
            require: [Block::OodEvent].into(),
            ..Default::default()
        };
        assert!(matches!(
            run_evaluation(&f.manifest(), &cfg),
            Err(EvalError::MissingBlock(Block::OodEvent))
        ));
        let bad = EvalConfig { jobs: 0, ..Default::default() };
        assert!(matches!(run_evaluation(&f.manifest(), &bad), Err(EvalError::Config(_))));

        // Missing file is an I/O error naming the path.
        let mut m = f.manifest();
        m.entries[0].prediction_path = f.dir.path().join("gone.fsr");
        let err = run_evaluation(&m, &EvalConfig::default()).unwrap_err();
        assert!(err.is_io());
        assert!(err.to_string().contains("gone.fsr"));

        // Out-of-range risk and mismatched sizes are content errors.
        let mut f = Fixture::new();
        f.id("a", &Raster::filled(16, 16, 1.5).unwrap(), &y, None);
        let err = run_evaluation(&f.manifest(), &EvalConfig::default()).unwrap_err();
        assert!(!err.is_io());
        assert!(err.to_string().contains("a.pred"));
        let mut f = Fixture::new();
        f.id("a", &ramp(16, 16), &ramp(16, 15), None);
        let err = run_evaluation(&f.manifest(), &EvalConfig::default()).unwrap_err();
        assert!(err.to_string().contains("height"), "{err}");
    }

    #[test]
    fn curves_are_emitted() {
        let mut f = Fixture::new();
        let mask = BinaryMask::new(4, 4, (0..16).map(|i| i % 2 == 0).collect()).unwrap();
        f.ood("e", &ramp(4, 4), Some(&mask));
        f.ood("c", &Raster::filled(4, 4, 0.2).unwrap(), None);
        let cfg = EvalConfig::default();
        let (report, curves) = run_evaluation_with_curves(&f.manifest(), &cfg).unwrap();
        assert_eq!(report, run_evaluation(&f.manifest(), &cfg).unwrap());
        let count = |name: &str| curves.iter().filter(|c| c.curve == name).count();
        assert_eq!(count("roc_event"), 3);
        assert_eq!(count("reliability_event"), 15);
        assert!(count("roc_pixel") > 2);
    }
}
