//! On-disk formats: the raster container, the evaluation manifest and the
//! metric report, plus atomic file writes.

mod container;
mod manifest;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub use container::{
    decode_raster, encode_raster, load_mask, load_raster, save_mask, save_raster, ContainerHeader,
    MAGIC, MAX_HEADER_LEN,
};
pub use manifest::{load_manifest, parse_manifest, EvalManifest, TileRecord, TileRole, MANIFEST_SCHEMA_VERSION};
pub use report::{
    emit_curves, emit_report, parse_report, BlockCounts, CurveRow, IdBlock, MetricReport, OodEventBlock,
    OodPixelBlock, OrdinalBlock, Provenance, ReportFormat, REPORT_SCHEMA_VERSION,
};

/// A problem with the content of a document, located by field.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("field `{field}`: {reason}")]
pub struct FormatError {
    pub field: String,
    pub reason: String,
}

impl FormatError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
}

impl IoError {
    pub fn path(&self) -> &Path {
        match self {
            IoError::Io { path, .. } | IoError::Format { path, .. } => path,
        }
    }

    /// True when the file system failed, as opposed to the content being invalid.
    pub fn is_io(&self) -> bool {
        matches!(self, IoError::Io { .. })
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn format(path: &Path, source: FormatError) -> Self {
        IoError::Format {
            path: path.to_path_buf(),
            source,
        }
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>, IoError> {
    fs::read(path).map_err(|e| IoError::io(path, e))
}

/// Writes `bytes` to a temporary file next to `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), IoError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IoError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| IoError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| IoError::io(path, e))?;
    tmp.persist(path).map_err(|e| IoError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.txt");
        write_atomic(&p, b"first").unwrap();
        write_atomic(&p, b"second").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"second");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn atomic_write_missing_dir_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nope").join("out.txt");
        let err = write_atomic(&p, b"x").unwrap_err();
        assert!(err.is_io());
        assert_eq!(err.path(), p);
        assert!(err.to_string().contains("out.txt"));
    }
}
