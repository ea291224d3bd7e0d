//! Cache-directory resolution: `--cache-dir` flag, then the
//! SUMRANGE_CACHE_DIR environment variable, then an optional
//! `sumrange.json` config file in the working directory, then
//! `.sumrange-cache`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Deserialize;

pub const CACHE_DIR_ENV: &str = "SUMRANGE_CACHE_DIR";
pub const CONFIG_FILE: &str = "sumrange.json";
pub const DEFAULT_CACHE_DIR: &str = ".sumrange-cache";

#[derive(Debug, Default, Deserialize)]
struct ConfigFile {
    cache_dir: Option<PathBuf>,
}

fn from_file(path: &Path) -> anyhow::Result<Option<PathBuf>> {
    let text = match fs::read_to_string(path) {
        Ok(text) => text,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e).with_context(|| format!("reading {}", path.display())),
    };
    let cfg: ConfigFile = serde_json::from_str(&text)
        .with_context(|| format!("malformed config {}", path.display()))?;
    Ok(cfg.cache_dir)
}

pub fn resolve_cache_dir(flag: Option<PathBuf>) -> anyhow::Result<PathBuf> {
    if let Some(dir) = flag {
        return Ok(dir);
    }
    if let Some(dir) = std::env::var_os(CACHE_DIR_ENV) {
        return Ok(PathBuf::from(dir));
    }
    if let Some(dir) = from_file(Path::new(CONFIG_FILE))? {
        return Ok(dir);
    }
    Ok(PathBuf::from(DEFAULT_CACHE_DIR))
}
