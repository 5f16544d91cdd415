//! Error types shared across the crate.

use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value is outside the documented domain.
    #[error("invalid argument: {0}")]
    Argument(String),
    /// A table cache file failed validation.
    #[error("cache: {0}")]
    Cache(#[from] CacheError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Why a cache file was rejected. Each check is reported separately so a
/// corrupt file names the validation that failed.
#[derive(Debug, Error)]
pub enum CacheError {
    #[error("bad magic bytes (expected \"CLAM\")")]
    BadMagic,
    #[error("unsupported format version {0} (expected 1)")]
    BadVersion(u16),
    #[error("unknown table kind byte {0}")]
    BadKind(u8),
    #[error("table kind mismatch: file holds {found}, expected {expected}")]
    KindMismatch { found: &'static str, expected: &'static str },
    #[error("checksum mismatch: stored {stored:#018x}, computed {computed:#018x}")]
    ChecksumMismatch { stored: u64, computed: u64 },
    #[error("file truncated or trailing bytes present")]
    Truncated,
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
