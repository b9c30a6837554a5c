//! Matrix Market and CSV interchange.
//!
//! The reader accepts `array` and `coordinate` formats with `real` or
//! `integer` fields and `general` or `symmetric` symmetry. The writer emits
//! `coordinate real general` with 17 significant digits, which round-trips
//! f64 values exactly.

use crate::cur::ErrorCertificate;
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmFormat {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MmSymmetry {
    General,
    Symmetric,
}

fn parse_header(line: &str) -> Result<(MmFormat, MmSymmetry)> {
    let mut tokens = line.split_whitespace();
    match tokens.next() {
        Some(t) if t.eq_ignore_ascii_case("%%MatrixMarket") => {}
        _ => {
            return Err(Error::MalformedHeader(
                "first line must start with %%MatrixMarket".into(),
            ))
        }
    }
    match tokens.next() {
        Some(t) if t.eq_ignore_ascii_case("matrix") => {}
        other => {
            return Err(Error::MalformedHeader(format!(
                "expected object 'matrix', got {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let format = match tokens.next() {
        Some(t) if t.eq_ignore_ascii_case("coordinate") => MmFormat::Coordinate,
        Some(t) if t.eq_ignore_ascii_case("array") => MmFormat::Array,
        other => {
            return Err(Error::MalformedHeader(format!(
                "expected format 'coordinate' or 'array', got {:?}",
                other.unwrap_or("")
            )))
        }
    };
    let field = tokens.next().unwrap_or("");
    if !(field.eq_ignore_ascii_case("real") || field.eq_ignore_ascii_case("integer")) {
        return Err(Error::UnsupportedField(field.to_string()));
    }
    let symmetry = match tokens.next() {
        Some(t) if t.eq_ignore_ascii_case("general") => MmSymmetry::General,
        Some(t) if t.eq_ignore_ascii_case("symmetric") => MmSymmetry::Symmetric,
        other => return Err(Error::UnsupportedSymmetry(other.unwrap_or("").to_string())),
    };
    Ok((format, symmetry))
}

fn parse_usize(tok: Option<&str>, what: &str) -> Result<usize> {
    tok.ok_or_else(|| Error::MalformedData(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::MalformedData(format!("cannot parse {what}")))
}

fn parse_f64(tok: Option<&str>, what: &str) -> Result<f64> {
    let v: f64 = tok
        .ok_or_else(|| Error::MalformedData(format!("missing {what}")))?
        .parse()
        .map_err(|_| Error::MalformedData(format!("cannot parse {what}")))?;
    if !v.is_finite() {
        return Err(Error::MalformedData(format!("{what} is not finite")));
    }
    Ok(v)
}

/// Reads a Matrix Market file into a dense matrix. Symmetric storage is
/// mirrored; indices are 1-based per the format.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let file = File::open(path)?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedHeader("empty file".into()))??;
    let (format, symmetry) = parse_header(&header)?;

    let mut data_lines = lines.filter_map(|l| match l {
        Ok(s) => {
            let t = s.trim().to_string();
            if t.is_empty() || t.starts_with('%') {
                None
            } else {
                Some(Ok(t))
            }
        }
        Err(e) => Some(Err(e)),
    });

    let size_line = data_lines
        .next()
        .ok_or_else(|| Error::MalformedData("missing size line".into()))??;
    let mut size_tokens = size_line.split_whitespace();
    let rows = parse_usize(size_tokens.next(), "row count")?;
    let cols = parse_usize(size_tokens.next(), "column count")?;
    if rows == 0 || cols == 0 {
        return Err(Error::MalformedData("dimensions must be positive".into()));
    }
    if symmetry == MmSymmetry::Symmetric && rows != cols {
        return Err(Error::MalformedData(
            "symmetric matrices must be square".into(),
        ));
    }

    let mut data = vec![0.0; rows * cols];
    match format {
        MmFormat::Coordinate => {
            let nnz = parse_usize(size_tokens.next(), "nonzero count")?;
            for _ in 0..nnz {
                let line = data_lines
                    .next()
                    .ok_or_else(|| Error::MalformedData("fewer entries than declared".into()))??;
                let mut t = line.split_whitespace();
                let i = parse_usize(t.next(), "row index")?;
                let j = parse_usize(t.next(), "column index")?;
                let v = parse_f64(t.next(), "entry value")?;
                if i == 0 || i > rows {
                    return Err(Error::IndexOutOfRange { index: i, bound: rows });
                }
                if j == 0 || j > cols {
                    return Err(Error::IndexOutOfRange { index: j, bound: cols });
                }
                data[(j - 1) * rows + (i - 1)] = v;
                if symmetry == MmSymmetry::Symmetric {
                    data[(i - 1) * rows + (j - 1)] = v;
                }
            }
        }
        MmFormat::Array => {
            let mut fill = |i: usize, j: usize, v: f64| {
                data[j * rows + i] = v;
                if symmetry == MmSymmetry::Symmetric {
                    data[i * rows + j] = v;
                }
            };
            // general: full column-major; symmetric: lower triangle per column
            let coords: Vec<(usize, usize)> = match symmetry {
                MmSymmetry::General => (0..cols)
                    .flat_map(|j| (0..rows).map(move |i| (i, j)))
                    .collect(),
                MmSymmetry::Symmetric => (0..cols)
                    .flat_map(|j| (j..rows).map(move |i| (i, j)))
                    .collect(),
            };
            for (i, j) in coords {
                let line = data_lines
                    .next()
                    .ok_or_else(|| Error::MalformedData("fewer values than declared".into()))??;
                let v = parse_f64(line.split_whitespace().next(), "array value")?;
                fill(i, j, v);
            }
        }
    }
    DenseMatrix::new(rows, cols, data)
}

/// Writes `coordinate real general` Matrix Market with 17 significant
/// digits per entry. A zero matrix produces a valid zero-entry file.
pub fn write_matrix_market(a: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    let nnz = a.data().iter().filter(|&&v| v != 0.0).count();
    writeln!(w, "{} {} {}", a.rows(), a.cols(), nnz)?;
    for j in 0..a.cols() {
        let col = a.column(j);
        for (i, &v) in col.iter().enumerate() {
            if v != 0.0 {
                writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One row of a sweep CSV.
#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub k: usize,
    pub method: String,
    pub observed_error: f64,
    pub sigma_next: f64,
    pub eta_p: f64,
    pub eta_q: f64,
    pub bound: f64,
    pub elapsed_ms: f64,
}

impl SweepRecord {
    pub fn from_certificate(
        k: usize,
        method: impl Into<String>,
        cert: &ErrorCertificate,
        elapsed_ms: f64,
    ) -> Self {
        Self {
            k,
            method: method.into(),
            observed_error: cert.observed_error,
            sigma_next: cert.sigma_next,
            eta_p: cert.eta_p,
            eta_q: cert.eta_q,
            bound: cert.bound,
            elapsed_ms,
        }
    }

    fn bound_consistent(&self) -> bool {
        let expect = (self.eta_p + self.eta_q) * self.sigma_next;
        (self.bound - expect).abs() <= 1e-12 * expect.abs().max(f64::MIN_POSITIVE)
    }
}

pub const SWEEP_CSV_HEADER: &str =
    "k,method,observed_error,sigma_next,eta_p,eta_q,bound,elapsed_ms";

/// Writes sweep records as CSV, ordered by (method, k), floats at 17
/// significant digits. The bound column is re-checked against
/// `(eta_p + eta_q) * sigma_next` before anything is written.
pub fn write_sweep_csv(records: &[SweepRecord], path: impl AsRef<Path>) -> Result<()> {
    if records.is_empty() {
        return Err(Error::InvalidSpec("no sweep records to write".into()));
    }
    for r in records {
        if !r.bound_consistent() {
            return Err(Error::InvalidSpec(format!(
                "record (method {}, k {}) has inconsistent bound",
                r.method, r.k
            )));
        }
    }
    let mut ordered: Vec<&SweepRecord> = records.iter().collect();
    ordered.sort_by(|a, b| a.method.cmp(&b.method).then(a.k.cmp(&b.k)));

    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in ordered {
        writeln!(
            w,
            "{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            r.k, r.method, r.observed_error, r.sigma_next, r.eta_p, r.eta_q, r.bound, r.elapsed_ms
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one 1-based index per line.
pub fn write_index_list(indices: &[usize], path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    for ix in indices {
        writeln!(w, "{ix}")?;
    }
    w.flush()?;
    Ok(())
}

/// Writes one value per line at 17 significant digits.
pub fn write_value_list(values: &[f64], path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path)?;
    let mut w = BufWriter::new(file);
    for v in values {
        writeln!(w, "{v:.16e}")?;
    }
    w.flush()?;
    Ok(())
}
