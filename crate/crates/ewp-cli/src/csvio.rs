//! Numeric CSV reading and writing.
//!
//! Dialect: comma separator, UTF-8, no quoting of numerics, optional single
//! header row auto-detected as a first row that fails numeric parsing.
//! Floats are written with 17 significant digits so every f64 round-trips
//! exactly.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ewp_core::DataMatrix;

use crate::commands::CliError;

/// 17 significant digits: enough for exact f64 round-trips.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_field(raw: &str, line: u64, col: usize) -> Result<f64, CliError> {
    raw.trim().parse::<f64>().map_err(|_| {
        CliError::Input(format!(
            "line {line}, column {}: not numeric: {raw:?}",
            col + 1
        ))
    })
}

fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map(|p| p.line()).unwrap_or(0)
}

/// Reads a rectangular numeric matrix, skipping a single non-numeric header
/// row when present. Errors carry a line/column diagnostic.
pub fn read_matrix(path: &Path) -> Result<DataMatrix, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;

    let mut values: Vec<f64> = Vec::new();
    let mut width: Option<usize> = None;
    let mut rows = 0usize;
    let mut first = true;
    for record in reader.records() {
        let record =
            record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = record_line(&record);
        if first {
            first = false;
            // header row: any field that fails numeric parsing
            if record.iter().any(|f| f.trim().parse::<f64>().is_err()) {
                width = Some(record.len());
                continue;
            }
        }
        if let Some(w) = width {
            if record.len() != w {
                return Err(CliError::Input(format!(
                    "line {line}: expected {w} columns, found {}",
                    record.len()
                )));
            }
        } else {
            width = Some(record.len());
        }
        for (col, field) in record.iter().enumerate() {
            values.push(parse_field(field, line, col)?);
        }
        rows += 1;
    }
    let width = width.filter(|w| *w > 0 && rows > 0).ok_or_else(|| {
        CliError::Input(format!("{}: no numeric rows", path.display()))
    })?;
    DataMatrix::new(rows, width, values)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Reads a single-column file of nonnegative integer labels (optional
/// header row, as in `read_matrix`).
pub fn read_labels(path: &Path) -> Result<Vec<usize>, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let mut labels = Vec::new();
    let mut first = true;
    for record in reader.records() {
        let record =
            record.map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        let line = record_line(&record);
        if record.len() != 1 {
            if first && record.iter().all(|f| f.trim().parse::<u64>().is_err()) {
                first = false;
                continue;
            }
            return Err(CliError::Input(format!(
                "line {line}: expected a single label column, found {} fields",
                record.len()
            )));
        }
        let field = record.get(0).unwrap_or_default();
        if first {
            first = false;
            if field.trim().parse::<u64>().is_err() {
                continue; // header
            }
        }
        let v = field.trim().parse::<u64>().map_err(|_| {
            CliError::Input(format!("line {line}, column 1: not a label: {field:?}"))
        })?;
        labels.push(v as usize);
    }
    if labels.is_empty() {
        return Err(CliError::Input(format!(
            "{}: no labels found",
            path.display()
        )));
    }
    Ok(labels)
}

pub fn write_matrix_rows<'a, I>(path: &Path, rows: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = &'a [f64]>,
{
    let mut out = BufWriter::new(File::create(path)?);
    for row in rows {
        let mut sep = "";
        for v in row {
            write!(out, "{sep}{}", format_float(*v))?;
            sep = ",";
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path)?);
    for l in labels {
        writeln!(out, "{l}")?;
    }
    out.flush()?;
    Ok(())
}

/// Weight file: one `feature_index,weight` row per feature.
pub fn write_weights(path: &Path, weights: &[f64]) -> Result<(), CliError> {
    let mut out = BufWriter::new(File::create(path)?);
    for (l, w) in weights.iter().enumerate() {
        writeln!(out, "{l},{}", format_float(*w))?;
    }
    out.flush()?;
    Ok(())
}
