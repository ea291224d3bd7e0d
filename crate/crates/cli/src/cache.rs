//! On-disk result cache and search checkpoints.
//!
//! Cache entries are single-entry atlas files keyed by (h, k, N) and the
//! generating code version; a key mismatch is reported and recomputed,
//! never silently reused. Loaded data is re-verified through the kernel
//! before use (see [`crate::formats::entry_to_result`]), so the cache is a
//! shortcut, not a trust boundary. All writes go through a temp file and an
//! atomic rename.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

use sumrange::range::{RangeResult, SearchCheckpoint, StructureReport};
use sumrange::IntegerSet;

use crate::formats::{
    atlas_from_json, atlas_to_json, entry_from_result, entry_to_result, AtlasFile, SizeEntry,
    SCHEMA_VERSION,
};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn write_atomic(path: &Path, bytes: &[u8]) -> anyhow::Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    fs::write(&tmp, bytes).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

fn range_key(h: u32, k: u64, bound: i64) -> String {
    format!("range-h{h}-k{k}-n{bound}")
}

fn cache_path(dir: &Path, h: u32, k: u64, bound: i64) -> PathBuf {
    dir.join(format!("{}-v{CODE_VERSION}.json", range_key(h, k, bound)))
}

/// Cached result for (h, k, N) under the current code version, re-verified.
/// `Ok(None)` covers both "no file" and "other-version files only"; the
/// latter is reported through `notes`.
pub fn load_range(
    dir: &Path,
    h: u32,
    k: u64,
    bound: i64,
    notes: &mut Vec<String>,
) -> anyhow::Result<Option<RangeResult>> {
    let path = cache_path(dir, h, k, bound);
    match fs::read_to_string(&path) {
        Ok(text) => {
            let atlas = atlas_from_json(&text)
                .with_context(|| format!("cache file {}", path.display()))?;
            let [entry] = atlas.entries.as_slice() else {
                bail!("cache file {} must hold exactly one entry", path.display());
            };
            if (entry.h, entry.k) != (h, k) || entry.search_bound != Some(bound) {
                bail!("cache file {} holds a different run", path.display());
            }
            let result = entry_to_result(entry)
                .with_context(|| format!("cache file {}", path.display()))?;
            Ok(Some(result))
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            for stale in versions_present(dir, &range_key(h, k, bound))? {
                notes.push(format!(
                    "cache entry from code version {stale} ignored (current is {CODE_VERSION})"
                ));
            }
            Ok(None)
        }
        Err(e) => Err(e).with_context(|| format!("reading {}", path.display())),
    }
}

fn versions_present(dir: &Path, key: &str) -> anyhow::Result<Vec<String>> {
    let mut found = Vec::new();
    let entries = match fs::read_dir(dir) {
        Ok(it) => it,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(found),
        Err(e) => return Err(e).with_context(|| format!("reading {}", dir.display())),
    };
    let prefix = format!("{key}-v");
    for entry in entries {
        let name = entry?.file_name();
        let Some(name) = name.to_str() else { continue };
        if let Some(rest) = name.strip_prefix(&prefix) {
            if let Some(version) = rest.strip_suffix(".json") {
                found.push(version.to_string());
            }
        }
    }
    found.sort();
    Ok(found)
}

pub fn store_range(
    dir: &Path,
    r: &RangeResult,
    structure: Option<&StructureReport>,
) -> anyhow::Result<PathBuf> {
    let bound = r
        .search_bound()
        .ok_or_else(|| anyhow!("only searched results are cached"))?;
    let atlas = AtlasFile {
        schema_version: SCHEMA_VERSION,
        generator: format!("sumrange {CODE_VERSION}"),
        entries: vec![entry_from_result(r, structure)],
    };
    let path = cache_path(dir, r.h(), r.k(), bound);
    write_atomic(&path, atlas_to_json(&atlas).as_bytes())?;
    Ok(path)
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointFile {
    schema_version: u32,
    code_version: String,
    h: u32,
    k: u64,
    bound: i64,
    /// Inclusive id ranges; shard ids within one a2 row are consecutive,
    /// so completed prefixes compact to a handful of ranges.
    done_ranges: Vec<(u64, u64)>,
    best: Vec<SizeEntry>,
}

fn checkpoint_path(dir: &Path, h: u32, k: u64, bound: i64) -> PathBuf {
    dir.join(format!("checkpoint-h{h}-k{k}-n{bound}-v{CODE_VERSION}.json"))
}

fn compact_ranges(ids: &BTreeSet<u64>) -> Vec<(u64, u64)> {
    let mut out: Vec<(u64, u64)> = Vec::new();
    for &id in ids {
        match out.last_mut() {
            Some((_, hi)) if *hi + 1 == id => *hi = id,
            _ => out.push((id, id)),
        }
    }
    out
}

pub fn store_checkpoint(
    dir: &Path,
    h: u32,
    k: u64,
    bound: i64,
    cp: &SearchCheckpoint,
) -> anyhow::Result<()> {
    let file = CheckpointFile {
        schema_version: SCHEMA_VERSION,
        code_version: CODE_VERSION.to_string(),
        h,
        k,
        bound,
        done_ranges: compact_ranges(&cp.done),
        best: cp
            .best
            .iter()
            .map(|(&size, w)| SizeEntry {
                size: size.to_string(),
                witness: w.elements().to_vec(),
            })
            .collect(),
    };
    let mut text =
        serde_json::to_string(&file).expect("checkpoint serialization cannot fail");
    text.push('\n');
    write_atomic(&checkpoint_path(dir, h, k, bound), text.as_bytes())
}

/// Checkpoint for (h, k, N), if one exists. Version or key skew is a hard
/// error: resuming from the wrong run must never happen silently. The
/// returned witnesses are re-verified again inside the search itself.
pub fn load_checkpoint(
    dir: &Path,
    h: u32,
    k: u64,
    bound: i64,
) -> anyhow::Result<Option<SearchCheckpoint>> {
    let path = checkpoint_path(dir, h, k, bound);
    let text = match fs::read_to_string(&path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let file: CheckpointFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed checkpoint {}", path.display()))?;
    if file.schema_version != SCHEMA_VERSION {
        bail!("checkpoint {} has unsupported schema", path.display());
    }
    if file.code_version != CODE_VERSION {
        bail!(
            "checkpoint {} was written by code version {}; delete it or rerun under that version",
            path.display(),
            file.code_version
        );
    }
    if (file.h, file.k, file.bound) != (h, k, bound) {
        bail!("checkpoint {} belongs to a different run", path.display());
    }
    let mut done = BTreeSet::new();
    for (lo, hi) in file.done_ranges {
        if lo > hi {
            bail!("checkpoint {} has an inverted id range", path.display());
        }
        done.extend(lo..=hi);
    }
    let mut best = BTreeMap::new();
    for s in &file.best {
        let size: u64 = s
            .size
            .parse()
            .with_context(|| format!("bad size literal {:?}", s.size))?;
        let w = IntegerSet::new(s.witness.clone())
            .map_err(|e| anyhow!("bad checkpoint witness for size {size}: {e}"))?;
        best.insert(size, w);
    }
    Ok(Some(SearchCheckpoint { done, best }))
}

pub fn remove_checkpoint(dir: &Path, h: u32, k: u64, bound: i64) -> anyhow::Result<()> {
    match fs::remove_file(checkpoint_path(dir, h, k, bound)) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(e.into()),
    }
}
