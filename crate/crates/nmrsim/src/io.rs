//! File emission helpers: CSV for numeric series, JSON for metadata.
//!
//! Output is byte-deterministic: floats print through the standard
//! shortest-round-trip formatter and JSON objects keep sorted keys.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::{Error, Result};

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source }
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
    }
    fs::write(path, contents).map_err(|e| io_err(path, e))
}

/// Write a CSV with a header row; every cell formats with `{}`.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut out = String::with_capacity(rows.len() * header.len() * 12);
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for v in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    write_text(path, &out)
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    write_text(path, &s)
}

/// Read a two-or-three-column numeric CSV (skipping the header line).
pub fn read_csv_columns(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match row {
            Ok(r) => rows.push(r),
            Err(e) => {
                return Err(Error::InvalidConfig(format!(
                    "{}:{}: {e}",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidConfig(format!("{}: no data rows", path.display())));
    }
    Ok(rows)
}

/// Append-free atomic write used for larger buffers.
pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| io_err(path, e))?;
    }
    let mut f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    f.write_all(bytes).map_err(|e| io_err(path, e))
}
