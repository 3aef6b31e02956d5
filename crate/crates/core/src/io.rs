//! File helpers: CSV with `#` metadata headers, content hashes and the cache directory.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Directory for orbit databases and checkpoints (`$DISTIL_CACHE_DIR`, default `.distil-cache`).
pub fn cache_dir() -> PathBuf {
    std::env::var_os("DISTIL_CACHE_DIR").map(PathBuf::from).unwrap_or_else(|| PathBuf::from(".distil-cache"))
}

/// Lower-case hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        write!(out, "{b:02x}").expect("writing to a String cannot fail");
    }
    out
}

/// Metadata written as `#` lines ahead of every CSV: the run configuration
/// and hashes of the inputs it read.
#[derive(Clone, Debug, Default)]
pub struct Provenance {
    pub config: serde_json::Value,
    pub inputs: Vec<(String, String)>,
}

impl Provenance {
    pub fn new<T: Serialize>(config: &T) -> Self {
        Provenance { config: serde_json::to_value(config).expect("config serializes"), inputs: Vec::new() }
    }

    pub fn with_input(mut self, name: &str, contents: &[u8]) -> Self {
        self.inputs.push((name.to_string(), sha256_hex(contents)));
        self
    }

    pub fn header(&self) -> String {
        let mut s = format!("# config: {}\n", self.config);
        for (name, hash) in &self.inputs {
            s.push_str(&format!("# input {name}: sha256:{hash}\n"));
        }
        s
    }
}

/// Render a table as CSV preceded by the provenance header.
pub fn csv_string(prov: &Provenance, header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is utf-8");
    Ok(prov.header() + &body)
}

/// Write `contents` to `path`, or stdout when `path` is `None` or `-`.
pub fn write_output(path: Option<&Path>, contents: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, contents)?;
        }
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(contents.as_bytes())?;
        }
    }
    Ok(())
}

/// Read a CSV that may start with `#` metadata lines.
pub fn read_csv(text: &str) -> Result<Vec<Vec<String>>> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(body.as_bytes());
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec?.iter().map(str::to_string).collect());
    }
    Ok(rows)
}
