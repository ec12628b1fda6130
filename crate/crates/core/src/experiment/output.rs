use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::config::ExperimentConfig;
use crate::Result;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Metadata written next to every CSV and binary output.
#[derive(Debug, Clone, Serialize)]
pub struct Sidecar<'a, T: Serialize> {
    pub file: String,
    pub tool: &'static str,
    pub tool_version: &'static str,
    pub config_hash: String,
    pub config: &'a ExperimentConfig,
    pub details: T,
}

/// Writes `name` in the output directory plus `name.json`.
pub fn write_with_sidecar<T: Serialize>(
    cfg: &ExperimentConfig,
    name: &str,
    bytes: &[u8],
    details: T,
) -> Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(&cfg.output)?;
    let path = cfg.output.join(name);
    std::fs::write(&path, bytes)?;
    let sidecar = Sidecar {
        file: name.to_string(),
        tool: "lfqh",
        tool_version: TOOL_VERSION,
        config_hash: cfg.hash(),
        config: cfg,
        details,
    };
    let meta = cfg.output.join(format!("{name}.json"));
    write_json(&meta, &sidecar)?;
    Ok((path, meta))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

/// Shortest round-trip scientific notation; `NaN` for missing values.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:e}")
    }
}

/// Interleaved little-endian `(re, im)` pairs.
pub fn complex_bytes(x: &[C64]) -> Vec<u8> {
    x.iter().flat_map(|c| c.re.to_le_bytes().into_iter().chain(c.im.to_le_bytes())).collect()
}

pub fn read_complex(bytes: &[u8]) -> Vec<C64> {
    bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect()
}
