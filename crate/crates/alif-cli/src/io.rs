//! CSV and binary artifacts. All numeric CSV output uses 17-significant-digit
//! decimals so files are diff-able and round-trip exactly; the binary matrix
//! layout is a (rows, cols) header of little-endian u64 followed by row-major
//! little-endian doubles.

use std::fs;
use std::io::Write;
use std::path::Path;

use alif_core::matrices::Mat;

use crate::spec::fmt_f64;
use crate::CliError;

/// Read a signal: one sample per line, blank lines ignored.
pub fn read_signal(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read signal `{}`: {e}", path.display())))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            CliError::config(format!(
                "signal `{}` line {}: cannot parse `{line}`",
                path.display(),
                lineno + 1
            ))
        })?;
        out.push(v);
    }
    Ok(out)
}

pub fn write_signal(path: &Path, samples: &[f64]) -> Result<(), CliError> {
    let mut text = String::with_capacity(samples.len() * 24);
    for v in samples {
        text.push_str(&fmt_f64(*v));
        text.push('\n');
    }
    write_file(path, text.as_bytes())
}

/// One matrix row per line, comma-separated.
pub fn write_matrix_csv(path: &Path, mat: &Mat) -> Result<(), CliError> {
    let n = mat.n();
    let mut text = String::new();
    for i in 0..n {
        let row: Vec<String> = mat.row(i).iter().map(|v| fmt_f64(*v)).collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_file(path, text.as_bytes())
}

/// Size header (rows, cols as little-endian u64) + row-major f64 LE payload.
pub fn write_matrix_binary(path: &Path, mat: &Mat) -> Result<(), CliError> {
    let n = mat.n() as u64;
    let mut bytes = Vec::with_capacity(16 + mat.data().len() * 8);
    bytes.extend_from_slice(&n.to_le_bytes());
    bytes.extend_from_slice(&n.to_le_bytes());
    for v in mat.data() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    write_file(path, &bytes)
}

/// Generic CSV writer: a header line plus stringified rows.
pub fn write_csv(path: &Path, header: &str, rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut text = String::new();
    text.push_str(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row.join(","));
        text.push('\n');
    }
    write_file(path, text.as_bytes())
}

pub fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::config(format!("serialize: {e}")))?;
    write_file(path, format!("{text}\n").as_bytes())
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::io(format!("cannot create `{}`: {e}", dir.display())))?;
    }
    let mut f = fs::File::create(path)
        .map_err(|e| CliError::io(format!("cannot create `{}`: {e}", path.display())))?;
    f.write_all(bytes)
        .map_err(|e| CliError::io(format!("cannot write `{}`: {e}", path.display())))
}
