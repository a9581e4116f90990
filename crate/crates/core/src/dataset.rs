//! Local-data curation: tiling, supertile crops, stratified splits and
//! climate-vector assembly.

mod climate;
mod split;
mod tiling;

use thiserror::Error;

pub use climate::{build_climate_vector, ClimateVariable, ClimateVector, MonthlyClimate, CLIMATE_LEN};
pub use split::{stratified_split, Candidate, GeoCell, Split, SplitSpec, Stratum, DEFAULT_CELL_DEGREES};
pub use tiling::{crop_from_supertile, tile_raster, TileGeometry, DEFAULT_TILE_SIZE};

use crate::raster::RasterError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DatasetError {
    #[error("tile size {size} exceeds parent dimensions {width}x{height}")]
    TileTooLarge { size: usize, width: usize, height: usize },
    #[error("tile size must be positive")]
    ZeroTileSize,
    #[error("supertile must be {expected}x{expected} for tile size {size}, got {width}x{height}")]
    SupertileShape {
        size: usize,
        expected: usize,
        width: usize,
        height: usize,
    },
    #[error("crop offset ({row}, {col}) outside [0, {size}]")]
    OffsetOutOfRange { row: usize, col: usize, size: usize },
    #[error("candidate list is empty")]
    NoCandidates,
    #[error("duplicate candidate id {0:?}")]
    DuplicateCandidate(String),
    #[error("requested {requested} samples but only {available} candidates exist")]
    InsufficientCandidates { requested: usize, available: usize },
    #[error("climate record missing for month {month}")]
    MissingMonth { month: u8 },
    #[error("climate record for month {month} is missing {variable}")]
    MissingVariable { month: u8, variable: &'static str },
    #[error("climate record for month {month} has non-finite {variable}")]
    NonFiniteClimate { month: u8, variable: &'static str },
    #[error("month {month} is outside 1..=12 or repeated")]
    InvalidMonth { month: u8 },
    #[error("climate vector must have {CLIMATE_LEN} values, got {0}")]
    ClimateLength(usize),
    #[error("wind direction {0} outside [0, 360)")]
    WindDirection(f64),
    #[error(transparent)]
    Raster(#[from] RasterError),
}
