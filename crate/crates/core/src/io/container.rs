//! Minimal raster container.
//!
//! Layout: the magic line `FSK-RASTER/1`, then a single-line JSON header,
//! then `width * height` little-endian `f32` values in row-major order.
//! Everything after the header's newline is payload.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{read_file, write_atomic, FormatError, IoError};
use crate::raster::{BinaryMask, Raster, RasterMeta};

pub const MAGIC: &[u8] = b"FSK-RASTER/1\n";
/// Headers longer than this are rejected before parsing.
pub const MAX_HEADER_LEN: usize = 64 * 1024;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContainerHeader {
    pub width: usize,
    pub height: usize,
    pub dtype: String,
    pub order: String,
    pub byte_order: String,
    pub tile_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lon: Option<f64>,
}

impl ContainerHeader {
    fn for_raster(r: &Raster) -> Self {
        let meta = r.meta();
        Self {
            width: r.width(),
            height: r.height(),
            dtype: "f32".to_owned(),
            order: "row-major".to_owned(),
            byte_order: "little-endian".to_owned(),
            tile_id: meta.tile_id.clone(),
            lat: meta.lat,
            lon: meta.lon,
        }
    }

    fn validate(&self) -> Result<usize, FormatError> {
        let fixed = [
            ("dtype", &self.dtype, "f32"),
            ("order", &self.order, "row-major"),
            ("byte_order", &self.byte_order, "little-endian"),
        ];
        for (field, got, want) in fixed {
            if got != want {
                return Err(FormatError::new(field, format!("expected {want:?}, got {got:?}")));
            }
        }
        if self.width == 0 {
            return Err(FormatError::new("width", "must be positive"));
        }
        if self.height == 0 {
            return Err(FormatError::new("height", "must be positive"));
        }
        if let Some(lat) = self.lat {
            if !(lat.is_finite() && (-90.0..=90.0).contains(&lat)) {
                return Err(FormatError::new("lat", format!("{lat} outside [-90, 90]")));
            }
        }
        if let Some(lon) = self.lon {
            if !(lon.is_finite() && (-180.0..=180.0).contains(&lon)) {
                return Err(FormatError::new("lon", format!("{lon} outside [-180, 180]")));
            }
        }
        self.width
            .checked_mul(self.height)
            .and_then(|n| n.checked_mul(4).map(|_| n))
            .ok_or_else(|| FormatError::new("width", "width * height overflows"))
    }
}

/// Serializes a raster. Values are narrowed to `f32`; rasters with nodata
/// or values outside the `f32` range are rejected.
pub fn encode_raster(r: &Raster) -> Result<Vec<u8>, FormatError> {
    if r.nodata().is_some() {
        return Err(FormatError::new("payload", "the container has no nodata channel"));
    }
    let header = serde_json::to_string(&ContainerHeader::for_raster(r))
        .map_err(|e| FormatError::new("header", e.to_string()))?;
    let mut out = Vec::with_capacity(MAGIC.len() + header.len() + 1 + r.len() * 4);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(header.as_bytes());
    out.push(b'\n');
    for (i, &v) in r.values().iter().enumerate() {
        let narrow = v as f32;
        if !narrow.is_finite() {
            return Err(FormatError::new(format!("payload[{i}]"), format!("{v} overflows f32")));
        }
        out.extend_from_slice(&narrow.to_le_bytes());
    }
    Ok(out)
}

/// Parses a container from memory. The header is fully validated before
/// the payload is inspected.
pub fn decode_raster(bytes: &[u8]) -> Result<Raster, FormatError> {
    let rest = bytes
        .strip_prefix(MAGIC)
        .ok_or_else(|| FormatError::new("magic", "missing FSK-RASTER/1 signature"))?;
    let scan = &rest[..rest.len().min(MAX_HEADER_LEN + 1)];
    let end = scan
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| FormatError::new("header", "unterminated or longer than 64 KiB"))?;
    let text = std::str::from_utf8(&rest[..end])
        .map_err(|_| FormatError::new("header", "not valid UTF-8"))?;
    let header: ContainerHeader =
        serde_json::from_str(text).map_err(|e| FormatError::new("header", e.to_string()))?;
    let n = header.validate()?;

    let payload = &rest[end + 1..];
    let expected = n * 4;
    if payload.len() != expected {
        return Err(FormatError::new(
            "payload",
            format!("expected {expected} bytes for {}x{}, found {}", header.width, header.height, payload.len()),
        ));
    }
    let mut values = Vec::with_capacity(n);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("chunk of 4"));
        if !v.is_finite() {
            return Err(FormatError::new(format!("payload[{i}]"), format!("non-finite value {v}")));
        }
        values.push(f64::from(v));
    }
    let raster = Raster::new(header.width, header.height, values)
        .map_err(|e| FormatError::new("payload", e.to_string()))?;
    Ok(raster.with_meta(RasterMeta {
        tile_id: header.tile_id,
        lat: header.lat,
        lon: header.lon,
    }))
}

pub fn load_raster(path: &Path) -> Result<Raster, IoError> {
    let bytes = read_file(path)?;
    decode_raster(&bytes).map_err(|e| IoError::format(path, e))
}

pub fn save_raster(r: &Raster, path: &Path) -> Result<(), IoError> {
    let bytes = encode_raster(r).map_err(|e| IoError::format(path, e))?;
    write_atomic(path, &bytes)
}

/// Loads a burn mask stored as a raster of exact 0 and 1 values.
pub fn load_mask(path: &Path) -> Result<BinaryMask, IoError> {
    let r = load_raster(path)?;
    if let Some((i, v)) = r.valid().find(|&(_, v)| v != 0.0 && v != 1.0) {
        return Err(IoError::format(
            path,
            FormatError::new(format!("payload[{i}]"), format!("mask value {v} is not 0 or 1")),
        ));
    }
    Ok(BinaryMask::from_raster(&r))
}

pub fn save_mask(mask: &BinaryMask, tile_id: &str, path: &Path) -> Result<(), IoError> {
    let values = mask.bits().iter().map(|&b| f64::from(u8::from(b))).collect();
    let r = Raster::new(mask.width(), mask.height(), values)
        .map_err(|e| IoError::format(path, FormatError::new("payload", e.to_string())))?
        .with_meta(RasterMeta {
            tile_id: tile_id.to_owned(),
            ..RasterMeta::default()
        });
    save_raster(&r, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use firescope_testkit as tk;

    fn sample() -> Raster {
        let mut rng = tk::rng(2);
        let vals: Vec<f64> = tk::uniform(&mut rng, 12, -3.0, 3.0)
            .into_iter()
            .map(|v| f64::from(v as f32))
            .collect();
        Raster::new(4, 3, vals).unwrap().with_meta(RasterMeta {
            tile_id: "t_r0_c0".into(),
            lat: Some(-33.8688),
            lon: Some(151.2093),
        })
    }

    #[test]
    fn roundtrips_bit_exactly() {
        let r = sample();
        let bytes = encode_raster(&r).unwrap();
        let back = decode_raster(&bytes).unwrap();
        assert_eq!(back, r);
        assert_eq!(encode_raster(&back).unwrap(), bytes);
        for (a, b) in back.values().iter().zip(r.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn header_layout() {
        let bytes = encode_raster(&Raster::filled(2, 1, 0.5).unwrap()).unwrap();
        let text = String::from_utf8_lossy(&bytes[..bytes.len() - 8]);
        assert_eq!(
            text,
            "FSK-RASTER/1\n{\"width\":2,\"height\":1,\"dtype\":\"f32\",\"order\":\"row-major\",\"byte_order\":\"little-endian\",\"tile_id\":\"\"}\n"
        );
        assert_eq!(&bytes[bytes.len() - 4..], &0.5f32.to_le_bytes());
    }

    #[test]
    fn short_payload_is_length_mismatch() {
        let mut bytes = encode_raster(&sample()).unwrap();
        bytes.truncate(bytes.len() - 4);
        let err = decode_raster(&bytes).unwrap_err();
        assert_eq!(err.field, "payload");
        assert!(err.reason.contains("expected 48 bytes"), "{}", err.reason);
    }

    #[test]
    fn zero_width_is_rejected_before_payload() {
        let bytes = b"FSK-RASTER/1\n{\"width\":0,\"height\":3,\"dtype\":\"f32\",\"order\":\"row-major\",\"byte_order\":\"little-endian\",\"tile_id\":\"x\"}\n";
        assert_eq!(decode_raster(bytes).unwrap_err().field, "width");
    }

    #[test]
    fn header_field_errors() {
        let good = encode_raster(&sample()).unwrap();
        let text = String::from_utf8_lossy(&good).into_owned();
        let cases = [
            ("\"f32\"", "\"f64\"", "dtype"),
            ("row-major", "col-major", "order"),
            ("little-endian", "big-endian", "byte_order"),
            ("\"lat\":-33.8688", "\"lat\":-133.0", "lat"),
            ("\"tile_id\"", "\"tile\"", "header"),
        ];
        for (from, to, field) in cases {
            let bad = text.replacen(from, to, 1);
            assert_eq!(decode_raster(bad.as_bytes()).unwrap_err().field, field, "{to}");
        }
        assert_eq!(decode_raster(b"GARBAGE").unwrap_err().field, "magic");
        assert_eq!(decode_raster(b"FSK-RASTER/1\n{").unwrap_err().field, "header");
    }

    #[test]
    fn non_finite_payload_names_index() {
        let mut bytes = encode_raster(&sample()).unwrap();
        let n = bytes.len();
        bytes[n - 8..n - 4].copy_from_slice(&f32::NAN.to_le_bytes());
        assert_eq!(decode_raster(&bytes).unwrap_err().field, "payload[10]");
    }

    #[test]
    fn encode_rejects_nodata_and_overflow() {
        let masked = Raster::with_nodata(1, 1, vec![0.0], vec![true]).unwrap();
        assert!(encode_raster(&masked).is_err());
        let huge = Raster::filled(1, 1, 1e300).unwrap();
        assert_eq!(encode_raster(&huge).unwrap_err().field, "payload[0]");
    }

    #[test]
    fn files_and_masks() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.fsr");
        let r = sample();
        save_raster(&r, &p).unwrap();
        assert_eq!(load_raster(&p).unwrap(), r);

        let m = BinaryMask::new(3, 1, vec![true, false, true]).unwrap();
        let mp = dir.path().join("m.fsr");
        save_mask(&m, "m", &mp).unwrap();
        assert_eq!(load_mask(&mp).unwrap(), m);
        // A non-binary raster is not a mask.
        let err = load_mask(&p).unwrap_err();
        assert!(!err.is_io());
        assert!(err.to_string().contains("a.fsr"));

        let missing = load_raster(&dir.path().join("missing.fsr")).unwrap_err();
        assert!(missing.is_io());
        assert!(missing.to_string().contains("missing.fsr"));
    }
}
