//! One JSON file per `(n, k)` cell. A file is trusted only if its
//! configuration hash and content digest both check out.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::IsospectralFamily;
use crate::error::Result;

const FORMAT: &str = "kohn-search-cell/1";

#[derive(Serialize, Deserialize)]
struct CellRecord {
    format: String,
    config: String,
    n: usize,
    k: u64,
    families: Vec<IsospectralFamily>,
    digest: String,
}

/// Hash of everything that determines a cell's result.
pub fn config_hash(n: usize, k: u64) -> String {
    hex::encode(Sha256::digest(format!("{FORMAT};n={n};k={k}")))
}

fn content_digest(families: &[IsospectralFamily]) -> Result<String> {
    Ok(hex::encode(Sha256::digest(serde_json::to_vec(families)?)))
}

pub fn cell_path(dir: &Path, n: usize, k: u64) -> PathBuf {
    dir.join(format!("cell-n{n}-k{k}.json"))
}

/// The stored result for a cell, or `None` when absent or untrustworthy.
pub fn load_cell(dir: &Path, n: usize, k: u64) -> Option<Vec<IsospectralFamily>> {
    let bytes = fs::read(cell_path(dir, n, k)).ok()?;
    let rec: CellRecord = serde_json::from_slice(&bytes).ok()?;
    let valid = rec.format == FORMAT
        && rec.config == config_hash(n, k)
        && rec.n == n
        && rec.k == k
        && content_digest(&rec.families).ok()? == rec.digest
        && rec.families.iter().all(|f| f.n == n && f.k == k);
    valid.then_some(rec.families)
}

/// Writes atomically via a temporary file and rename.
pub fn store_cell(dir: &Path, n: usize, k: u64, families: &[IsospectralFamily]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let rec = CellRecord {
        format: FORMAT.into(),
        config: config_hash(n, k),
        n,
        k,
        families: families.to_vec(),
        digest: content_digest(families)?,
    };
    let path = cell_path(dir, n, k);
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, serde_json::to_vec_pretty(&rec)?)?;
    fs::rename(tmp, path)?;
    Ok(())
}
