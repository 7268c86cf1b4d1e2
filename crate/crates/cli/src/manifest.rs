//! Run manifest: what was run, with which resolved parameters, and which
//! files came out.
//!
//! The manifest is written next to the outputs as `<command>_manifest.json`
//! and lists every other output with its size and SHA-256, so a consumer can
//! verify integrity. The timestamp is the only field that varies between
//! identical runs (pin it with SOURCE_DATE_EPOCH for byte-reproducible
//! manifests); all data outputs are byte-reproducible unconditionally.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::resolve::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputEntry {
    /// File name relative to the output directory.
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub tool_version: String,
    pub timestamp: String,
    pub outputs: Vec<OutputEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Wall clock, unless SOURCE_DATE_EPOCH overrides it (the reproducible-builds
/// convention: seconds since the Unix epoch).
fn run_timestamp() -> String {
    let stamp = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<i64>().ok())
        .and_then(|secs| chrono::DateTime::from_timestamp(secs, 0));
    stamp.unwrap_or_else(chrono::Utc::now).to_rfc3339()
}

impl RunManifest {
    pub fn new(command: &str, parameters: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: run_timestamp(),
            outputs: Vec::new(),
        }
    }

    /// Hashes an already-written output file and records it.
    pub fn add_file(&mut self, path: &Path) -> CliResult<()> {
        let bytes = fs::read(path)?;
        let file = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        self.outputs.push(OutputEntry {
            file,
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    /// Writes `<command>_manifest.json` into `dir` and returns its path.
    /// Hyphens in the command become underscores so the manifest sorts next
    /// to its data files (`drive_profile.csv`, `drive_profile_manifest.json`).
    pub fn write(&self, dir: &Path) -> CliResult<PathBuf> {
        let path = dir.join(format!("{}_manifest.json", self.command.replace('-', "_")));
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }

    /// Re-hashes every listed output under `dir`; errors on any mismatch.
    pub fn verify(&self, dir: &Path) -> CliResult<()> {
        for entry in &self.outputs {
            let path = dir.join(&entry.file);
            let bytes = fs::read(&path).map_err(|e| {
                CliError::domain(anyhow::anyhow!("{}: {e}", path.display()))
            })?;
            if bytes.len() as u64 != entry.bytes || sha256_hex(&bytes) != entry.sha256 {
                return Err(CliError::domain(anyhow::anyhow!(
                    "{}: contents do not match the manifest",
                    path.display()
                )));
            }
        }
        Ok(())
    }
}
