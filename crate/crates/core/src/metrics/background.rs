use super::MetricError;
use crate::raster::{BinaryMask, Raster};

/// Split of a tile's pixels for out-of-distribution discrimination.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OodRole {
    /// Tile containing a recorded wildfire; carries a burn mask.
    Event,
    /// Control area with no recorded wildfire.
    Control,
}

/// A scored out-of-distribution tile.
#[derive(Debug, Clone, Copy)]
pub struct OodTile<'a> {
    pub tile_id: &'a str,
    pub role: OodRole,
    pub prediction: &'a Raster,
    pub mask: Option<&'a BinaryMask>,
}

/// Pixel scores grouped by the background rule: burnt pixels are positives,
/// control-tile pixels are negatives, and unburnt pixels inside event tiles
/// are background, excluded from discrimination.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PixelEvalSet {
    pub positive_scores: Vec<f64>,
    pub negative_scores: Vec<f64>,
    pub background_scores: Vec<f64>,
}

impl PixelEvalSet {
    pub fn len(&self) -> usize {
        self.positive_scores.len() + self.negative_scores.len() + self.background_scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Pools pixel scores from `tiles` in the order given. Nodata pixels are
/// dropped.
pub fn assemble_pixel_eval(tiles: &[OodTile<'_>]) -> Result<PixelEvalSet, MetricError> {
    let mut out = PixelEvalSet::default();
    for t in tiles {
        match (t.role, t.mask) {
            (OodRole::Event, None) => return Err(MetricError::MissingMask(t.tile_id.to_owned())),
            (OodRole::Control, Some(_)) => {
                return Err(MetricError::UnexpectedMask(t.tile_id.to_owned()))
            }
            (OodRole::Event, Some(mask)) => {
                mask.matches(t.prediction)?;
                for (i, v) in t.prediction.valid() {
                    if mask.bits()[i] {
                        out.positive_scores.push(v);
                    } else {
                        out.background_scores.push(v);
                    }
                }
            }
            (OodRole::Control, None) => {
                out.negative_scores.extend(t.prediction.valid().map(|(_, v)| v));
            }
        }
    }
    Ok(out)
}
