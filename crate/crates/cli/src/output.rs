//! CSV files with a provenance header line.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// First 16 hex digits of the SHA-256 of `value` serialized as JSON.
pub fn config_hash<S: Serialize>(value: &S) -> String {
    let json = serde_json::to_vec(value).expect("configuration serializes to JSON");
    Sha256::digest(&json)
        .iter()
        .take(8)
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Identifies the run that produced a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Header {
    pub experiment: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Header {
    pub fn line(&self) -> String {
        format!(
            "# riscorr {VERSION} experiment={} seed={} config={}\n",
            self.experiment, self.seed, self.config_hash
        )
    }
}

/// Collects rows for one CSV file.
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self, header: &Header) -> Vec<u8> {
        let mut out = header.line().into_bytes();
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row).expect("writing to memory");
        }
        w.flush().expect("writing to memory");
        drop(w);
        out
    }

    pub fn write(&self, dir: &Path, name: &str, header: &Header) -> Result<PathBuf, CliError> {
        let path = dir.join(name);
        fs::write(&path, self.render(header)).map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

/// Shortest round-trip text of a float.
pub fn num(x: f64) -> String {
    format!("{x}")
}
