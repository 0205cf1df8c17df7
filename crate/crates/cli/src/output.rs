//! Atomic file output and the CSV tables written by the subcommands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use tempfile::NamedTempFile;
use weighted_range::io::format_f64;

use crate::CliError;

/// Writes `bytes` to `dir/name` through a temporary file in the same directory and a rename,
/// so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", dir.join(name).display()));
    fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| io(e.error))?;
    Ok(path)
}

/// CSV with a header row; every number rendered with 17 significant digits.
pub fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV");
    for row in rows {
        w.write_record(row.iter().map(|&x| format_f64(x)))
            .expect("in-memory CSV");
    }
    w.into_inner().expect("in-memory CSV")
}

/// Boundary rows `(theta, x, y)`; `theta` is the polar angle of the vertex about the
/// vertex mean.
pub fn boundary_csv(vertices: &[Complex64]) -> Vec<u8> {
    let center = if vertices.is_empty() {
        Complex64::new(0.0, 0.0)
    } else {
        vertices.iter().sum::<Complex64>() / vertices.len() as f64
    };
    csv_table(
        &["theta", "x", "y"],
        vertices
            .iter()
            .map(|v| vec![(v - center).arg(), v.re, v.im]),
    )
}

/// Reads the vertices back from a boundary CSV.
pub fn read_boundary_csv(bytes: &[u8]) -> Result<Vec<Complex64>, CliError> {
    let mut r = csv::Reader::from_reader(bytes);
    let mut out = Vec::new();
    for (k, record) in r.records().enumerate() {
        let record = record.map_err(|e| CliError::Input(format!("boundary CSV: {e}")))?;
        let field = |i: usize| -> Result<f64, CliError> {
            record
                .get(i)
                .ok_or_else(|| CliError::Input(format!("boundary CSV row {}: missing column {i}", k + 2)))?
                .parse()
                .map_err(|e| CliError::Input(format!("boundary CSV row {}: {e}", k + 2)))
        };
        out.push(Complex64::new(field(1)?, field(2)?));
    }
    Ok(out)
}
