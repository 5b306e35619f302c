//! CSV emission: `#`-prefixed metadata lines, a header row, LF endings.

use std::io::Write;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// First 16 hex digits of the SHA-256 of the config's compact JSON text.
pub fn config_hash_of_json(json: &str) -> String {
    let digest = Sha256::digest(json.as_bytes());
    hex::encode(digest)[..16].to_string()
}

pub fn config_hash<T: Serialize>(config: &T) -> Result<String> {
    let json = serde_json::to_string(config).map_err(std::io::Error::other)?;
    Ok(config_hash_of_json(&json))
}

/// Writes the metadata comment lines: master seed, config hash and the
/// fully resolved config.
pub fn write_metadata<T: Serialize>(
    out: &mut dyn Write,
    master_seed: u64,
    config: &T,
) -> Result<()> {
    let json = serde_json::to_string(config).map_err(std::io::Error::other)?;
    writeln!(out, "# master_seed={master_seed}")?;
    writeln!(out, "# config_hash={}", config_hash_of_json(&json))?;
    writeln!(out, "# config={json}")?;
    Ok(())
}

/// Lines of a CSV document that are neither comments nor blank.
pub fn csv_body(text: &str) -> Vec<&str> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .collect()
}
