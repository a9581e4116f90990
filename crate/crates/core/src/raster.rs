//! Raster representation and the shared pixel-level primitives.
//!
//! A [`Raster`] is a row-major grid of `f64` values with an optional nodata
//! mask. Masked pixels are excluded from every mean, rank and metric sum in
//! the crate; their stored values are never read and may be non-finite.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::CompensatedSum;

/// Number of ordinal risk classes produced by [`discretize_mean_risk`].
pub const ORDINAL_CLASSES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RasterError {
    #[error("raster dimensions must be positive, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("expected {expected} values for a {width}x{height} raster, got {actual}")]
    LengthMismatch {
        width: usize,
        height: usize,
        expected: usize,
        actual: usize,
    },
    #[error("non-finite value {value} at pixel {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },
    #[error("raster of {width}x{height} is too small: {what} needs at least {min} per axis")]
    TooSmall {
        width: usize,
        height: usize,
        min: usize,
        what: &'static str,
    },
    #[error("raster has no unmasked pixels")]
    Empty,
    #[error("value {value} at pixel {index} outside [{lo}, {hi}]")]
    OutOfRange {
        index: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },
}

/// Geometry metadata carried alongside pixel values.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RasterMeta {
    pub tile_id: String,
    /// Latitude of the tile centroid in degrees.
    pub lat: Option<f64>,
    /// Longitude of the tile centroid in degrees.
    pub lon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Raster {
    width: usize,
    height: usize,
    values: Vec<f64>,
    nodata: Option<Vec<bool>>,
    meta: RasterMeta,
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<(), RasterError> {
    if width == 0 || height == 0 {
        return Err(RasterError::ZeroDimension { width, height });
    }
    let expected = width
        .checked_mul(height)
        .ok_or(RasterError::ZeroDimension { width, height })?;
    if len != expected {
        return Err(RasterError::LengthMismatch {
            width,
            height,
            expected,
            actual: len,
        });
    }
    Ok(())
}

impl Raster {
    /// Builds a fully valid raster; every value must be finite.
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self, RasterError> {
        check_dims(width, height, values.len())?;
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(RasterError::NonFinite { index, value });
        }
        Ok(Self {
            width,
            height,
            values,
            nodata: None,
            meta: RasterMeta::default(),
        })
    }

    /// Builds a raster with a nodata mask (`true` = excluded).
    pub fn with_nodata(
        width: usize,
        height: usize,
        values: Vec<f64>,
        nodata: Vec<bool>,
    ) -> Result<Self, RasterError> {
        check_dims(width, height, values.len())?;
        check_dims(width, height, nodata.len())?;
        if let Some((index, &value)) = values
            .iter()
            .zip(&nodata)
            .enumerate()
            .find(|(_, (v, masked))| !**masked && !v.is_finite())
            .map(|(i, (v, _))| (i, v))
        {
            return Err(RasterError::NonFinite { index, value });
        }
        let nodata = nodata.iter().any(|&m| m).then_some(nodata);
        Ok(Self {
            width,
            height,
            values,
            nodata,
            meta: RasterMeta::default(),
        })
    }

    pub fn filled(width: usize, height: usize, value: f64) -> Result<Self, RasterError> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, RasterError> {
        let mut values = Vec::with_capacity(width * height);
        for row in 0..height {
            for col in 0..width {
                values.push(f(row, col));
            }
        }
        Self::new(width, height, values)
    }

    pub fn with_meta(mut self, meta: RasterMeta) -> Self {
        self.meta = meta;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nodata(&self) -> Option<&[bool]> {
        self.nodata.as_deref()
    }

    pub fn meta(&self) -> &RasterMeta {
        &self.meta
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    #[inline]
    pub fn is_masked(&self, index: usize) -> bool {
        self.nodata.as_ref().is_some_and(|m| m[index])
    }

    /// Unmasked `(index, value)` pairs in row-major order.
    pub fn valid(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values
            .iter()
            .copied()
            .enumerate()
            .filter(move |(i, _)| !self.is_masked(*i))
    }

    pub fn valid_count(&self) -> usize {
        match &self.nodata {
            None => self.values.len(),
            Some(m) => m.iter().filter(|&&x| !x).count(),
        }
    }

    pub fn same_dims(&self, other: &Raster) -> Result<(), RasterError> {
        if self.width != other.width || self.height != other.height {
            return Err(RasterError::DimensionMismatch {
                left_width: self.width,
                left_height: self.height,
                right_width: other.width,
                right_height: other.height,
            });
        }
        Ok(())
    }

    /// Mean over unmasked pixels.
    pub fn mean(&self) -> Result<f64, RasterError> {
        crate::numeric::mean(self.valid().map(|(_, v)| v)).ok_or(RasterError::Empty)
    }

    /// Maximum over unmasked pixels.
    pub fn max(&self) -> Result<f64, RasterError> {
        self.valid()
            .map(|(_, v)| v)
            .reduce(f64::max)
            .ok_or(RasterError::Empty)
    }

    /// Applies `f` to every unmasked value, keeping the mask and metadata.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Raster {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| if self.is_masked(i) { v } else { f(v) })
            .collect();
        Raster {
            width: self.width,
            height: self.height,
            values,
            nodata: self.nodata.clone(),
            meta: self.meta.clone(),
        }
    }

    /// Copies the `size_h x size_w` window whose top-left corner is `(row, col)`.
    pub(crate) fn window(&self, row: usize, col: usize, size_w: usize, size_h: usize) -> Raster {
        let mut values = Vec::with_capacity(size_w * size_h);
        let mut mask = self.nodata.as_ref().map(|_| Vec::with_capacity(size_w * size_h));
        for r in row..row + size_h {
            let start = r * self.width + col;
            values.extend_from_slice(&self.values[start..start + size_w]);
            if let (Some(dst), Some(src)) = (mask.as_mut(), self.nodata.as_ref()) {
                dst.extend_from_slice(&src[start..start + size_w]);
            }
        }
        let nodata = mask.filter(|m| m.iter().any(|&x| x));
        Raster {
            width: size_w,
            height: size_h,
            values,
            nodata,
            meta: RasterMeta::default(),
        }
    }

    /// Fails with [`RasterError::OutOfRange`] if any unmasked value leaves `[lo, hi]`.
    pub fn check_range(&self, lo: f64, hi: f64) -> Result<(), RasterError> {
        match self.valid().find(|&(_, v)| !(lo..=hi).contains(&v)) {
            Some((index, value)) => Err(RasterError::OutOfRange { index, value, lo, hi }),
            None => Ok(()),
        }
    }
}

/// Per-pixel burn annotation; `true` marks a burnt pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, RasterError> {
        check_dims(width, height, bits.len())?;
        Ok(Self { width, height, bits })
    }

    /// Reads a mask from a raster, treating any non-zero unmasked value as burnt.
    pub fn from_raster(r: &Raster) -> Self {
        let bits = r
            .values()
            .iter()
            .enumerate()
            .map(|(i, &v)| !r.is_masked(i) && v != 0.0)
            .collect();
        Self {
            width: r.width(),
            height: r.height(),
            bits,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn matches(&self, r: &Raster) -> Result<(), RasterError> {
        if self.width != r.width() || self.height != r.height() {
            return Err(RasterError::DimensionMismatch {
                left_width: r.width(),
                left_height: r.height(),
                right_width: self.width,
                right_height: self.height,
            });
        }
        Ok(())
    }
}

/// Affine min-max map of the unmasked values into `[0, 1]`.
///
/// A constant raster (or one with a single valid pixel) maps to all zeros.
pub fn match_range(r: &Raster) -> Raster {
    let (lo, hi) = r
        .valid()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, v)| {
            (lo.min(v), hi.max(v))
        });
    let span = hi - lo;
    if !(span > 0.0) {
        return r.map(|_| 0.0);
    }
    r.map(|v| ((v - lo) / span).clamp(0.0, 1.0))
}

/// Forward differences along columns (`dx`, width - 1 columns) and rows
/// (`dy`, height - 1 rows). A difference touching a masked pixel is masked.
pub fn finite_diff(r: &Raster) -> Result<(Raster, Raster), RasterError> {
    let (w, h) = (r.width(), r.height());
    if w < 2 || h < 2 {
        return Err(RasterError::TooSmall {
            width: w,
            height: h,
            min: 2,
            what: "finite differences",
        });
    }
    let masked = |i: usize| r.is_masked(i);
    let mut dx = Vec::with_capacity((w - 1) * h);
    let mut dx_mask = Vec::with_capacity((w - 1) * h);
    for row in 0..h {
        for col in 0..w - 1 {
            let i = row * w + col;
            let m = masked(i) || masked(i + 1);
            dx_mask.push(m);
            dx.push(if m { 0.0 } else { r.values[i + 1] - r.values[i] });
        }
    }
    let mut dy = Vec::with_capacity(w * (h - 1));
    let mut dy_mask = Vec::with_capacity(w * (h - 1));
    for row in 0..h - 1 {
        for col in 0..w {
            let i = row * w + col;
            let m = masked(i) || masked(i + w);
            dy_mask.push(m);
            dy.push(if m { 0.0 } else { r.values[i + w] - r.values[i] });
        }
    }
    Ok((
        Raster::with_nodata(w - 1, h, dx, dx_mask)?,
        Raster::with_nodata(w, h - 1, dy, dy_mask)?,
    ))
}

/// Ordinal risk label of a raster: `floor(mean * 10)`, with a mean of exactly
/// 1.0 landing in the top class 9.
pub fn discretize_mean_risk(r: &Raster) -> Result<u8, RasterError> {
    r.check_range(0.0, 1.0)?;
    let mut acc = CompensatedSum::new();
    let mut n = 0usize;
    for (_, v) in r.valid() {
        acc.add(v);
        n += 1;
    }
    if n == 0 {
        return Err(RasterError::Empty);
    }
    let mean = acc.total() / n as f64;
    Ok(ordinal_label(mean))
}

/// Bins a risk level in `[0, 1]` into one of ten evenly spaced classes.
pub fn ordinal_label(level: f64) -> u8 {
    let bin = (level * ORDINAL_CLASSES as f64).floor();
    bin.clamp(0.0, (ORDINAL_CLASSES - 1) as f64) as u8
}
