//! Binary table cache.
//!
//! Layout, all little-endian:
//!
//! ```text
//! offset  size       field
//! 0       4          magic "CLAM"
//! 4       2          format version, currently 1
//! 6       1          table kind: 0 = spf, 1 = phi, 2 = lambda
//! 7       8          limit L
//! 15      4*(L+1)    table entries, 32-bit each
//! ...     8          checksum: sum of all entry bytes mod 2^64
//! ```
//!
//! The loader rejects wrong magic, wrong version, unknown or mismatched
//! kind, truncation, trailing bytes, and checksum mismatches.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{CacheError, Result};

pub const MAGIC: [u8; 4] = *b"CLAM";
pub const VERSION: u16 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableKind {
    Spf,
    Phi,
    Lambda,
}

impl TableKind {
    pub fn as_byte(self) -> u8 {
        match self {
            TableKind::Spf => 0,
            TableKind::Phi => 1,
            TableKind::Lambda => 2,
        }
    }

    pub fn from_byte(b: u8) -> Option<TableKind> {
        match b {
            0 => Some(TableKind::Spf),
            1 => Some(TableKind::Phi),
            2 => Some(TableKind::Lambda),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            TableKind::Spf => "spf",
            TableKind::Phi => "phi",
            TableKind::Lambda => "lambda",
        }
    }
}

fn byte_sum_u32(v: u32) -> u64 {
    v.to_le_bytes().iter().map(|&b| b as u64).sum()
}

/// Write a table to `path`. `entries.len()` must be `limit + 1`.
pub fn write_table(path: &Path, kind: TableKind, limit: u64, entries: &[u32]) -> Result<()> {
    assert_eq!(entries.len() as u64, limit + 1, "entry count must be limit + 1");
    let file = File::create(path).map_err(CacheError::Io)?;
    let mut w = BufWriter::new(file);
    let inner = |w: &mut BufWriter<File>| -> std::io::Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&[kind.as_byte()])?;
        w.write_all(&limit.to_le_bytes())?;
        let mut checksum = 0u64;
        for &v in entries {
            w.write_all(&v.to_le_bytes())?;
            checksum = checksum.wrapping_add(byte_sum_u32(v));
        }
        w.write_all(&checksum.to_le_bytes())?;
        w.flush()
    };
    inner(&mut w).map_err(CacheError::Io)?;
    Ok(())
}

/// Read a table from `path`, validating every header field and the
/// trailing checksum. Returns `(limit, entries)`.
pub fn read_table(path: &Path, expected: TableKind) -> Result<(u64, Vec<u32>)> {
    let file = File::open(path).map_err(CacheError::Io)?;
    let mut r = BufReader::new(file);

    let mut magic = [0u8; 4];
    read_exact_or_truncated(&mut r, &mut magic)?;
    if magic != MAGIC {
        return Err(CacheError::BadMagic.into());
    }
    let mut ver = [0u8; 2];
    read_exact_or_truncated(&mut r, &mut ver)?;
    let version = u16::from_le_bytes(ver);
    if version != VERSION {
        return Err(CacheError::BadVersion(version).into());
    }
    let mut kind_byte = [0u8; 1];
    read_exact_or_truncated(&mut r, &mut kind_byte)?;
    let kind = TableKind::from_byte(kind_byte[0]).ok_or(CacheError::BadKind(kind_byte[0]))?;
    if kind != expected {
        return Err(CacheError::KindMismatch {
            found: kind.name(),
            expected: expected.name(),
        }
        .into());
    }
    let mut limit_bytes = [0u8; 8];
    read_exact_or_truncated(&mut r, &mut limit_bytes)?;
    let limit = u64::from_le_bytes(limit_bytes);
    if limit > u32::MAX as u64 {
        return Err(CacheError::Truncated.into());
    }

    let count = (limit + 1) as usize;
    let mut entries = vec![0u32; count];
    let mut checksum = 0u64;
    let mut buf = [0u8; 4];
    for slot in entries.iter_mut() {
        read_exact_or_truncated(&mut r, &mut buf)?;
        checksum = checksum.wrapping_add(buf.iter().map(|&b| b as u64).sum::<u64>());
        *slot = u32::from_le_bytes(buf);
    }
    let mut stored_bytes = [0u8; 8];
    read_exact_or_truncated(&mut r, &mut stored_bytes)?;
    let stored = u64::from_le_bytes(stored_bytes);
    if stored != checksum {
        return Err(CacheError::ChecksumMismatch { stored, computed: checksum }.into());
    }
    // no bytes may follow the checksum
    let mut one = [0u8; 1];
    match r.read(&mut one) {
        Ok(0) => Ok((limit, entries)),
        Ok(_) => Err(CacheError::Truncated.into()),
        Err(e) => Err(CacheError::Io(e).into()),
    }
}

fn read_exact_or_truncated(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    match r.read_exact(buf) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::UnexpectedEof => {
            Err(CacheError::Truncated.into())
        }
        Err(e) => Err(CacheError::Io(e).into()),
    }
}
