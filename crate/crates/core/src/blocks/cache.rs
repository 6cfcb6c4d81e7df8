//! On-disk store for blocks found by search.
//!
//! One JSON file per [`BlockSpec`], named by the SHA-256 of the spec's JSON
//! encoding. Files are written to a temporary name and renamed into place, so a
//! reader never sees a half-written block. Loaded blocks are re-verified by the
//! caller; a stale or corrupt file is simply ignored.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::BlockSpec;
use crate::graphs::PartialFactor;
use crate::io::{factors_from_records, FactorRecord};

#[derive(Debug, Serialize, Deserialize)]
struct CachedBlock {
    spec: BlockSpec,
    cycle_length: usize,
    factors: Vec<FactorRecord>,
}

pub(crate) fn file_name(spec: &BlockSpec) -> String {
    let encoded = serde_json::to_string(spec).expect("specs always serialise");
    let digest = Sha256::digest(encoded.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    format!("{hex}.json")
}

fn path_for(dir: &Path, spec: &BlockSpec) -> PathBuf {
    dir.join(file_name(spec))
}

pub(crate) fn load(dir: &Path, spec: &BlockSpec) -> Option<Vec<PartialFactor>> {
    let text = fs::read_to_string(path_for(dir, spec)).ok()?;
    let cached: CachedBlock = serde_json::from_str(&text).ok()?;
    if &cached.spec != spec {
        return None;
    }
    factors_from_records(&cached.factors, cached.cycle_length).ok()
}

pub(crate) fn store(
    dir: &Path,
    spec: &BlockSpec,
    cycle_length: usize,
    factors: &[PartialFactor],
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let cached =
        CachedBlock { spec: spec.clone(), cycle_length, factors: factors.iter().map(FactorRecord::from).collect() };
    let text = serde_json::to_string(&cached).map_err(std::io::Error::other)?;
    let target = path_for(dir, spec);
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    tmp.persist(&target).map_err(|e| e.error)?;
    Ok(())
}
