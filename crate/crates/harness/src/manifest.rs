//! `manifest.json`: what was run, with which inputs, and hashes of every
//! artifact written next to it.

use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::checks::{CheckOutcome, Size};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Artifact {
    pub file: String,
    pub sha256: String,
    /// Printed in full by `report`.
    pub summary: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LastHealthy {
    pub t: f64,
    pub energy: f64,
    pub smallness: f64,
    pub low: f64,
    pub a_high: f64,
    pub u_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum Status {
    Passed,
    Failed,
    Diverged {
        t: f64,
        reason: String,
        last_healthy: Option<LastHealthy>,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    /// Preset id or config file name.
    pub name: String,
    pub seed: u64,
    pub size: Option<Size>,
    /// The resolved inputs; `config_hash` is the SHA-256 of their canonical JSON.
    pub config: serde_json::Value,
    pub config_hash: String,
    pub versions: Versions,
    pub status: Status,
    pub checks: Vec<CheckOutcome>,
    pub artifacts: Vec<Artifact>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Versions {
    pub harness: String,
    pub rustc_target: String,
}

impl Versions {
    pub fn current() -> Self {
        Versions {
            harness: env!("CARGO_PKG_VERSION").to_string(),
            rustc_target: format!("{}-{}", std::env::consts::ARCH, std::env::consts::OS),
        }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the compact JSON form; `serde_json` keeps map keys sorted.
pub fn config_hash(config: &serde_json::Value) -> String {
    sha256_hex(config.to_string().as_bytes())
}

pub fn hash_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(sha256_hex(&bytes))
}

impl Manifest {
    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }

    pub fn read(dir: &Path) -> Result<Manifest> {
        let path = dir.join(MANIFEST_FILE);
        let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Passed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        let a = serde_json::json!({"b": 1, "a": [1.5, 2]});
        let b = serde_json::json!({"a": [1.5, 2], "b": 1});
        assert_eq!(config_hash(&a), config_hash(&b));
    }
}
