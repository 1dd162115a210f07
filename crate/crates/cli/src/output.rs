//! Output directory handling, CSV/JSON emission and the run manifest.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const RECORD_FILE: &str = "run.json";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: usize,
    pub sha256: String,
}

/// Writes files into one run directory and remembers their digests.
pub struct Outputs {
    dir: PathBuf,
    manifest: Vec<ManifestEntry>,
}

impl Outputs {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
            manifest: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|source| CliError::Write { path, source })?;
        self.manifest.retain(|e| e.path != name);
        self.manifest.push(ManifestEntry {
            path: name.to_string(),
            bytes: bytes.len(),
            sha256: sha256_hex(bytes),
        });
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    /// Writes a CSV file; numbers use the shortest round-trip representation.
    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut w = csv::Writer::from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Write {
            path: self.dir.join(name),
            source: std::io::Error::other(e),
        };
        w.write_record(header).map_err(fail)?;
        for row in rows {
            w.write_record(&row).map_err(fail)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Write {
            path: self.dir.join(name),
            source: e.into_error(),
        })?;
        self.put(name, &bytes)
    }

    pub fn manifest(&self) -> Vec<ManifestEntry> {
        let mut m = self.manifest.clone();
        m.sort_by(|a, b| a.path.cmp(&b.path));
        m
    }
}

/// Formats an optional number; `None` becomes an empty field.
pub fn num(x: impl Into<Option<f64>>) -> String {
    x.into().map(|v| v.to_string()).unwrap_or_default()
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the canonical config JSON together with the effective seed.
    pub config_sha256: String,
    pub wall_time_seconds: f64,
    pub verdicts: BTreeMap<String, String>,
    pub exit_code: u8,
    /// Every emitted file except this record.
    pub files: Vec<ManifestEntry>,
}
