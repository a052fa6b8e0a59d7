//! Matrix file formats.
//!
//! - `dense`: one row per line, whitespace-separated decimals. Blank lines and
//!   lines starting with `#` are skipped.
//! - `csv`: one record per row, comma-separated decimals, no header.
//!
//! Only decimal literals are accepted; fractions such as `1/3` are rejected.

use std::fmt::Write as _;
use std::path::Path;

use matchfactor::DenseMatrix;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MatrixFormat {
    Dense,
    Csv,
}

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("input contains no matrix rows")]
    Empty,
    #[error("row {row} has {got} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, got: usize },
    #[error("matrix is not square: {rows} rows of {cols} entries")]
    NotSquare { rows: usize, cols: usize },
    #[error("row {row}: `{token}` is not a decimal number")]
    BadToken { row: usize, token: String },
    #[error(transparent)]
    Invalid(#[from] matchfactor::Error),
}

fn parse_token(token: &str, row: usize) -> Result<f64, ParseError> {
    let token = token.trim();
    let bad = || ParseError::BadToken { row, token: token.to_string() };
    // `f64::from_str` also takes "inf"/"nan"; those are rejected later as
    // non-finite, but anything without a digit is not a decimal literal.
    if !token.bytes().any(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    token.parse::<f64>().map_err(|_| bad())
}

fn assemble(rows: Vec<Vec<f64>>) -> Result<DenseMatrix, ParseError> {
    let first = rows.first().ok_or(ParseError::Empty)?;
    let width = first.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(ParseError::Ragged { row: i + 1, expected: width, got: r.len() });
        }
    }
    if width != rows.len() {
        return Err(ParseError::NotSquare { rows: rows.len(), cols: width });
    }
    Ok(DenseMatrix::from_rows(&rows)?)
}

pub fn parse_dense(text: &str) -> Result<DenseMatrix, ParseError> {
    let mut rows = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = rows.len() + 1;
        rows.push(line.split_whitespace().map(|t| parse_token(t, row)).collect::<Result<Vec<_>, _>>()?);
    }
    assemble(rows)
}

pub fn parse_csv(text: &str) -> Result<DenseMatrix, ParseError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = rows.len() + 1;
        rows.push(record.iter().map(|t| parse_token(t, row)).collect::<Result<Vec<_>, _>>()?);
    }
    assemble(rows)
}

pub fn parse_matrix_str(text: &str, format: MatrixFormat) -> Result<DenseMatrix, ParseError> {
    match format {
        MatrixFormat::Dense => parse_dense(text),
        MatrixFormat::Csv => parse_csv(text),
    }
}

pub fn parse_matrix(path: &Path, format: MatrixFormat) -> Result<DenseMatrix, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ParseError::Io { path: path.display().to_string(), source })?;
    parse_matrix_str(&text, format)
}

/// 17 significant digits: enough to round-trip any binary64.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Dense text rendering that [`parse_dense`] reads back bit-exactly.
pub fn format_dense(m: &DenseMatrix) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|&v| format_real(v)).collect();
        writeln!(out, "{}", line.join(" ")).expect("writing to a String");
    }
    out
}
