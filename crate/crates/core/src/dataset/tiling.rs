use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::raster::{Raster, RasterMeta};

/// Tile edge length in pixels (roughly 100 km² at 30 m resolution).
pub const DEFAULT_TILE_SIZE: usize = 341;

/// Placement of a square tile inside its parent raster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TileGeometry {
    pub origin_row: usize,
    pub origin_col: usize,
    pub size: usize,
    pub parent_id: String,
}

impl TileGeometry {
    /// Identifier derived from the parent id and the tile's grid position.
    pub fn tile_id(&self) -> String {
        format!(
            "{}_r{}_c{}",
            self.parent_id,
            self.origin_row / self.size,
            self.origin_col / self.size
        )
    }
}

/// Cuts `parent` into non-overlapping `size x size` tiles in row-major order.
/// Partial tiles along the right and bottom edges are dropped.
pub fn tile_raster(parent: &Raster, size: usize) -> Result<Vec<(TileGeometry, Raster)>, DatasetError> {
    if size == 0 {
        return Err(DatasetError::ZeroTileSize);
    }
    if size > parent.width() || size > parent.height() {
        return Err(DatasetError::TileTooLarge {
            size,
            width: parent.width(),
            height: parent.height(),
        });
    }
    let (rows, cols) = (parent.height() / size, parent.width() / size);
    let mut tiles = Vec::with_capacity(rows * cols);
    for tr in 0..rows {
        for tc in 0..cols {
            let geom = TileGeometry {
                origin_row: tr * size,
                origin_col: tc * size,
                size,
                parent_id: parent.meta().tile_id.clone(),
            };
            let meta = RasterMeta {
                tile_id: geom.tile_id(),
                lat: None,
                lon: None,
            };
            let tile = parent
                .window(geom.origin_row, geom.origin_col, size, size)
                .with_meta(meta);
            tiles.push((geom, tile));
        }
    }
    Ok(tiles)
}

/// Crops a `size x size` window from a 2x2 supertile.
///
/// Offsets range over `[0, size]` on each axis, so `(0, 0)` and
/// `(size, size)` reproduce the top-left and bottom-right source tiles.
pub fn crop_from_supertile(
    supertile: &Raster,
    offset_row: usize,
    offset_col: usize,
    size: usize,
) -> Result<Raster, DatasetError> {
    if size == 0 {
        return Err(DatasetError::ZeroTileSize);
    }
    let expected = 2 * size;
    if supertile.width() != expected || supertile.height() != expected {
        return Err(DatasetError::SupertileShape {
            size,
            expected,
            width: supertile.width(),
            height: supertile.height(),
        });
    }
    if offset_row > size || offset_col > size {
        return Err(DatasetError::OffsetOutOfRange {
            row: offset_row,
            col: offset_col,
            size,
        });
    }
    Ok(supertile.window(offset_row, offset_col, size, size))
}
