//! Evaluation manifest: the catalog of tiles to score.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{read_file, FormatError, IoError};
use crate::raster::ORDINAL_CLASSES;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TileRole {
    /// In-distribution test tile, scored against a target risk raster.
    IdTest,
    /// Out-of-distribution tile with a recorded wildfire and burn mask.
    OodEvent,
    /// Out-of-distribution control area without a recorded wildfire.
    OodControl,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TileRecord {
    pub tile_id: String,
    pub role: TileRole,
    pub prediction_path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_path: Option<PathBuf>,
    /// JSON array of 60 climatology values, variable-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub climate_path: Option<PathBuf>,
    pub year: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    /// Ordinal risk the oracle assigned to this tile, 0 to 9.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_label: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalManifest {
    pub schema_version: u32,
    pub entries: Vec<TileRecord>,
}

impl EvalManifest {
    pub fn new(entries: Vec<TileRecord>) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            entries,
        }
    }

    pub fn validate(&self) -> Result<(), FormatError> {
        if self.schema_version != MANIFEST_SCHEMA_VERSION {
            return Err(FormatError::new(
                "schema_version",
                format!("unsupported version {}, expected {MANIFEST_SCHEMA_VERSION}", self.schema_version),
            ));
        }
        if self.entries.is_empty() {
            return Err(FormatError::new("entries", "manifest lists no tiles"));
        }
        let mut seen = BTreeSet::new();
        for (i, e) in self.entries.iter().enumerate() {
            let field = |name: &str| format!("entries[{i}].{name}");
            if e.tile_id.is_empty() {
                return Err(FormatError::new(field("tile_id"), "must not be empty"));
            }
            if !seen.insert(e.tile_id.as_str()) {
                return Err(FormatError::new(field("tile_id"), format!("duplicate tile id {:?}", e.tile_id)));
            }
            let (needs_target, needs_mask) = match e.role {
                TileRole::IdTest => (true, false),
                TileRole::OodEvent => (false, true),
                TileRole::OodControl => (false, false),
            };
            let role = serde_json::to_string(&e.role).unwrap_or_default();
            match (needs_target, e.target_path.is_some()) {
                (true, false) => return Err(FormatError::new(field("target_path"), format!("required for role {role}"))),
                (false, true) => return Err(FormatError::new(field("target_path"), format!("not allowed for role {role}"))),
                _ => {}
            }
            match (needs_mask, e.mask_path.is_some()) {
                (true, false) => return Err(FormatError::new(field("mask_path"), format!("required for role {role}"))),
                (false, true) => return Err(FormatError::new(field("mask_path"), format!("not allowed for role {role}"))),
                _ => {}
            }
            if let Some(label) = e.oracle_label {
                if e.role != TileRole::IdTest {
                    return Err(FormatError::new(field("oracle_label"), format!("not allowed for role {role}")));
                }
                if usize::from(label) >= ORDINAL_CLASSES {
                    return Err(FormatError::new(field("oracle_label"), format!("{label} outside 0..=9")));
                }
            }
        }
        Ok(())
    }

    /// Rebases relative paths onto `base`.
    pub fn resolve(mut self, base: &Path) -> Self {
        let join = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for e in &mut self.entries {
            join(&mut e.prediction_path);
            for p in [&mut e.target_path, &mut e.mask_path, &mut e.climate_path].into_iter().flatten() {
                join(p);
            }
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

pub fn parse_manifest(text: &str) -> Result<EvalManifest, FormatError> {
    let m: EvalManifest = serde_json::from_str(text).map_err(|e| FormatError::new("manifest", e.to_string()))?;
    m.validate()?;
    Ok(m)
}

/// Reads and validates a manifest; relative paths are taken relative to
/// the manifest's own directory.
pub fn load_manifest(path: &Path) -> Result<EvalManifest, IoError> {
    let bytes = read_file(path)?;
    let text = std::str::from_utf8(&bytes)
        .map_err(|_| IoError::format(path, FormatError::new("manifest", "not valid UTF-8")))?;
    let m = parse_manifest(text).map_err(|e| IoError::format(path, e))?;
    let base = path.parent().unwrap_or(Path::new(""));
    Ok(m.resolve(base))
}
