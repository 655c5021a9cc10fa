//! Plot-ready CSV tables and run manifests. Data files carry the full
//! resolved configuration in '#' header lines and never a timestamp,
//! so re-running a manifest reproduces them byte for byte; the
//! timestamp lives in the manifest only.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Full round-trip decimal formatting (Rust's shortest representation
/// that parses back exactly).
pub fn fmt(v: f64) -> String {
    format!("{v}")
}

/// A CSV document with '#'-prefixed metadata lines.
pub struct CsvDoc {
    comments: Vec<String>,
    header: String,
    rows: Vec<String>,
}

impl CsvDoc {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            comments: Vec::new(),
            header: columns.join(","),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn row(&mut self, fields: &[String]) {
        self.rows.push(fields.join(","));
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for line in &self.comments {
            out.push_str("# ");
            out.push_str(line);
            out.push('\n');
        }
        out.push_str(&self.header);
        out.push('\n');
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }
}

/// Write-temp-then-rename; the target appears atomically.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Everything needed to reproduce a run: the command, the resolved
/// configuration, the seed, the outputs it produced, the library
/// version and a timestamp (the only non-reproducible line).
#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub library_version: String,
    pub seed: u64,
    pub timestamp_unix: u64,
    pub outputs: Vec<String>,
    pub config: serde_json::Value,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: serde_json::Value) -> Self {
        Self {
            command: command.to_string(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp_unix: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: Vec::new(),
            config,
        }
    }

    pub fn record(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join("manifest.json");
        let body = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Usage(format!("manifest serialization: {e}")))?;
        write_atomic(&path, &(body + "\n"))?;
        Ok(path)
    }
}

/// Uniform-bin histogram export: (bin_left, bin_right, count).
pub fn histogram(samples: &[f64], bins: usize) -> Vec<(f64, f64, u64)> {
    assert!(bins >= 1 && !samples.is_empty());
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = ((hi - lo) / bins as f64).max(f64::MIN_POSITIVE);
    let mut counts = vec![0u64; bins];
    for &v in samples {
        let idx = (((v - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (lo + i as f64 * width, lo + (i as f64 + 1.0) * width, c))
        .collect()
}
