//! `fsk`: batch tool for tiling, normalizing, sampling and evaluating
//! wildfire risk rasters.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 on I/O errors.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use firescope_core::dataset::{stratified_split, tile_raster, Candidate, GeoCell, SplitSpec, DEFAULT_CELL_DEGREES, DEFAULT_TILE_SIZE};
use firescope_core::evaluation::{run_evaluation_with_curves, Block, EvalConfig, EvalError, TileScore};
use firescope_core::interpretability::{consistency, fidelity, ModificationKind, PairedPrediction};
use firescope_core::io::{
    emit_curves, emit_report, load_manifest, load_raster, read_file, save_raster, write_atomic, IoError,
    ReportFormat,
};
use firescope_core::quintile::{fit_quintile, QuintileTransform};
use firescope_core::raster::ORDINAL_CLASSES;
use firescope_core::training::{parse_oracle_output, reward, RewardConfig};

#[derive(Parser)]
#[command(name = "fsk", version, about = "Wildfire risk raster toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut a raster into square tiles.
    Tile(TileArgs),
    /// Apply a rank-based quintile transform to a raster.
    Normalize(NormalizeArgs),
    /// Split candidate tiles into train/val/test by geographic stratum.
    Sample(SampleArgs),
    /// Evaluate a manifest of predictions and write a metric report.
    Eval(EvalArgs),
    /// Compute the oracle reward for one response.
    Reward(RewardArgs),
    /// Score fidelity or consistency between two prediction rasters.
    Interp(InterpArgs),
}

#[derive(Args)]
struct TileArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TILE_SIZE)]
    size: usize,
    /// Parent id used in tile names; defaults to the input's tile id or file stem.
    #[arg(long)]
    parent_id: Option<String>,
}

#[derive(Args)]
struct NormalizeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Reference rasters whose pixels form the fitting population.
    #[arg(long, num_args = 1.., required_unless_present = "transform", conflicts_with = "transform")]
    reference: Vec<PathBuf>,
    /// Previously saved transform JSON.
    #[arg(long)]
    transform: Option<PathBuf>,
    /// Write the fitted transform here.
    #[arg(long, requires = "reference")]
    save_transform: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    /// CSV with columns id, lat, lon, risk_bin.
    #[arg(long)]
    candidates: PathBuf,
    /// Output CSV with columns id, split.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    train: usize,
    #[arg(long)]
    val: usize,
    #[arg(long)]
    test: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_CELL_DEGREES)]
    cell_deg: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TileScoreArg {
    Mean,
    Max,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: FormatArg,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    #[arg(long, default_value_t = 15)]
    ece_bins: usize,
    #[arg(long, value_enum, default_value = "mean")]
    tile_score: TileScoreArg,
    /// Worker threads; defaults to the number of available cores.
    #[arg(long, env = "FSK_JOBS")]
    jobs: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated blocks that must be present (id, ood_event, ood_pixel, ordinal).
    #[arg(long, value_delimiter = ',')]
    blocks: Vec<Block>,
    /// TOML file whose values override the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write ROC and reliability curve rows as CSV.
    #[arg(long)]
    curves: Option<PathBuf>,
}

#[derive(Args)]
struct RewardArgs {
    /// Predicted ordinal class.
    #[arg(long, conflicts_with = "text", required_unless_present = "text")]
    pred: Option<u8>,
    /// Raw oracle response; the prediction and format flag are parsed from it.
    #[arg(long)]
    text: Option<PathBuf>,
    #[arg(long)]
    actual: u8,
    #[arg(long, conflicts_with = "text")]
    format_ok: bool,
    /// Ten comma-separated training label counts for class weighting.
    #[arg(long, value_delimiter = ',')]
    frequencies: Option<Vec<u64>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Perturbed,
    Paraphrased,
}

#[derive(Args)]
struct InterpArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[arg(long)]
    orig: PathBuf,
    #[arg(long = "mod")]
    modified: PathBuf,
}

/// A failure and the exit code it maps to.
enum Failure {
    Validation(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    fn validation(e: impl Into<anyhow::Error>) -> Self {
        Failure::Validation(e.into())
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        if e.is_io() {
            Failure::Io(e.into())
        } else {
            Failure::Validation(e.into())
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        if e.is_io() {
            Failure::Io(e.into())
        } else {
            Failure::Validation(e.into())
        }
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Tile(a) => tile(a),
        Command::Normalize(a) => normalize(a),
        Command::Sample(a) => sample(a),
        Command::Eval(a) => eval(a),
        Command::Reward(a) => reward_cmd(a),
        Command::Interp(a) => interp(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn tile(a: TileArgs) -> Result<()> {
    let mut parent = load_raster(&a.input)?;
    let parent_id = a
        .parent_id
        .or_else(|| Some(parent.meta().tile_id.clone()).filter(|s| !s.is_empty()))
        .or_else(|| a.input.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "tile".to_owned());
    let mut meta = parent.meta().clone();
    meta.tile_id = parent_id;
    parent = parent.with_meta(meta);
    let tiles = tile_raster(&parent, a.size).map_err(Failure::validation)?;
    fs::create_dir_all(&a.out_dir)
        .map_err(|e| Failure::Io(anyhow!("{}: cannot create directory: {e}", a.out_dir.display())))?;
    for (geom, r) in &tiles {
        let id = geom.tile_id();
        save_raster(r, &a.out_dir.join(format!("{id}.fsr")))?;
        println!("{id}");
    }
    Ok(())
}

fn normalize(a: NormalizeArgs) -> Result<()> {
    let transform: QuintileTransform = match &a.transform {
        Some(p) => {
            let bytes = read_file(p)?;
            serde_json::from_slice(&bytes)
                .map_err(|e| Failure::validation(anyhow!("{}: field `transform`: {e}", p.display())))?
        }
        None => {
            let mut population = Vec::new();
            for p in &a.reference {
                population.extend(load_raster(p)?.valid().map(|(_, v)| v));
            }
            fit_quintile(&population).map_err(Failure::validation)?
        }
    };
    if let Some(p) = &a.save_transform {
        let mut json = serde_json::to_string_pretty(&transform).expect("transform serializes");
        json.push('\n');
        write_atomic(p, json.as_bytes())?;
    }
    let input = load_raster(&a.input)?;
    save_raster(&transform.apply(&input), &a.out)?;
    Ok(())
}

#[derive(Deserialize)]
struct CandidateRow {
    id: String,
    lat: f64,
    lon: f64,
    risk_bin: u8,
}

fn sample(a: SampleArgs) -> Result<()> {
    if !(a.cell_deg > 0.0 && a.cell_deg.is_finite()) {
        return Err(Failure::validation(anyhow!("--cell-deg must be positive")));
    }
    let bytes = read_file(&a.candidates)?;
    let mut reader = csv::Reader::from_reader(bytes.as_slice());
    let mut candidates = Vec::new();
    for (i, row) in reader.deserialize::<CandidateRow>().enumerate() {
        let row = row.map_err(|e| {
            Failure::validation(anyhow!("{}: row {}: {e}", a.candidates.display(), i + 1))
        })?;
        if !(-90.0..=90.0).contains(&row.lat) || !(-180.0..=180.0).contains(&row.lon) {
            return Err(Failure::validation(anyhow!(
                "{}: row {}: field `lat`/`lon` out of range",
                a.candidates.display(),
                i + 1
            )));
        }
        candidates.push(Candidate {
            id: row.id,
            cell: GeoCell::from_lat_lon(row.lat, row.lon, a.cell_deg),
            risk_bin: row.risk_bin,
        });
    }
    let spec = SplitSpec {
        target_counts: [a.train, a.val, a.test],
        seed: a.seed,
    };
    let splits = stratified_split(&candidates, &spec).map_err(Failure::validation)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "split"]).expect("in-memory write");
    for (id, split) in &splits {
        w.write_record([id.as_str(), split.as_str()]).expect("in-memory write");
    }
    let out = w.into_inner().expect("in-memory flush");
    write_atomic(&a.out, &out)?;
    Ok(())
}

/// Lays the values of `overlay` over `base`, merging nested tables.
fn merge(base: &mut toml::Table, overlay: toml::Table) {
    for (k, v) in overlay {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

fn eval_config(a: &EvalArgs) -> Result<EvalConfig> {
    let jobs = a
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cfg = EvalConfig {
        threshold: a.threshold,
        ece_bins: a.ece_bins,
        tile_score: match a.tile_score {
            TileScoreArg::Mean => TileScore::Mean,
            TileScoreArg::Max => TileScore::Max,
        },
        require: a.blocks.iter().copied().collect(),
        seed: a.seed,
        jobs,
        ..EvalConfig::default()
    };
    let Some(path) = &a.config else {
        return Ok(cfg);
    };
    let bytes = read_file(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| Failure::validation(anyhow!("{}: not valid UTF-8", path.display())))?;
    let overlay: toml::Table = toml::from_str(text)
        .map_err(|e| Failure::validation(anyhow!("{}: {e}", path.display())))?;
    let mut base = toml::Table::try_from(&cfg).map_err(|e| Failure::validation(anyhow!("flags: {e}")))?;
    merge(&mut base, overlay);
    base.try_into()
        .map_err(|e| Failure::validation(anyhow!("{}: {e}", path.display())))
}

fn eval(a: EvalArgs) -> Result<()> {
    let cfg = eval_config(&a)?;
    let manifest = load_manifest(&a.manifest)?;
    let (report, curves) = run_evaluation_with_curves(&manifest, &cfg)?;
    let format = match a.format {
        FormatArg::Json => ReportFormat::Json,
        FormatArg::Csv => ReportFormat::Csv,
    };
    if let Some(p) = &a.curves {
        write_atomic(p, emit_curves(&curves).as_bytes())?;
    }
    write_atomic(&a.out, emit_report(&report, format).as_bytes())?;
    Ok(())
}

fn reward_cmd(a: RewardArgs) -> Result<()> {
    let class_frequencies = match a.frequencies {
        None => None,
        Some(v) => Some(<[u64; ORDINAL_CLASSES]>::try_from(v.as_slice()).map_err(|_| {
            Failure::validation(anyhow!("--frequencies needs {ORDINAL_CLASSES} counts, got {}", v.len()))
        })?),
    };
    let cfg = RewardConfig {
        class_frequencies,
        ..RewardConfig::default()
    };
    let (pred, format_ok) = match &a.text {
        Some(p) => {
            let bytes = read_file(p)?;
            let answer = parse_oracle_output(&String::from_utf8_lossy(&bytes));
            (answer.digit, answer.format_ok)
        }
        None => (a.pred, a.format_ok),
    };
    let r = reward(pred, a.actual, format_ok, &cfg).map_err(Failure::validation)?;
    println!("{r:?}");
    Ok(())
}

fn interp(a: InterpArgs) -> Result<()> {
    let kind = match a.kind {
        KindArg::Perturbed => ModificationKind::Perturbed,
        KindArg::Paraphrased => ModificationKind::Paraphrased,
    };
    let pair = PairedPrediction::new(load_raster(&a.orig)?, load_raster(&a.modified)?, kind)
        .map_err(|e| Failure::validation(anyhow!("{} vs {}: {e}", path_str(&a.orig), path_str(&a.modified))))?;
    let score = match kind {
        ModificationKind::Perturbed => fidelity(&pair),
        ModificationKind::Paraphrased => consistency(&pair),
    }
    .map_err(Failure::validation)?;
    println!("{score:?}");
    Ok(())
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}
