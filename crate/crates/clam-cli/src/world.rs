//! Table acquisition: consult the cache directory, build what is missing,
//! persist what was built.
//!
//! Cache files are named `<kind>_<limit>.clam` under `$CLAM_CACHE_DIR`
//! (default: the per-user cache directory). A file that exists but fails
//! validation is an error, never silently rebuilt — delete it explicitly.

use std::path::{Path, PathBuf};

use clam::arith::{build_tables, LambdaTable, PhiTable};
use clam::error::CacheError;
use clam::sieve::SpfTable;
use clam::{Error, Result};

pub fn cache_dir() -> PathBuf {
    if let Some(dir) = std::env::var_os("CLAM_CACHE_DIR") {
        return PathBuf::from(dir);
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return Path::new(&dir).join("clam");
    }
    if let Some(home) = std::env::var_os("HOME") {
        return Path::new(&home).join(".cache").join("clam");
    }
    if let Some(local) = std::env::var_os("LOCALAPPDATA") {
        return Path::new(&local).join("clam");
    }
    std::env::temp_dir().join("clam-cache")
}

pub fn cache_path(kind: &str, limit: u64) -> PathBuf {
    cache_dir().join(format!("{kind}_{limit}.clam"))
}

fn ensure_cache_dir() -> Result<()> {
    std::fs::create_dir_all(cache_dir()).map_err(|e| Error::Cache(CacheError::Io(e)))
}

pub fn load_spf(limit: u64) -> Result<SpfTable> {
    let path = cache_path("spf", limit);
    if path.is_file() {
        return SpfTable::load_cache(&path);
    }
    let spf = SpfTable::build(limit)?;
    ensure_cache_dir()?;
    spf.write_cache(&path)?;
    Ok(spf)
}

pub fn load_tables(limit: u64, spf: &SpfTable) -> Result<(PhiTable, LambdaTable)> {
    let phi_path = cache_path("phi", limit);
    let lambda_path = cache_path("lambda", limit);
    if phi_path.is_file() && lambda_path.is_file() {
        return Ok((
            PhiTable::load_cache(&phi_path)?,
            LambdaTable::load_cache(&lambda_path)?,
        ));
    }
    let (phi, lambda) = build_tables(limit, spf)?;
    ensure_cache_dir()?;
    phi.write_cache(&phi_path)?;
    lambda.write_cache(&lambda_path)?;
    Ok((phi, lambda))
}
