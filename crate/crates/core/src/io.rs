//! Plain-text matrix and vector files.
//!
//! Matrix: a header line `rows cols`, then one whitespace-separated row per
//! line. Vector: a header line `len`, then one value per line. Blank lines
//! are ignored. Values are written with 17 significant digits, which
//! round-trips every finite `f64` exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, ParseErrorKind, Result};
use crate::linalg::DenseMatrix;

/// `{:.16e}`: 17 significant digits, `.` decimal point, no grouping.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_err(path: &Path, line: usize, kind: ParseErrorKind) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        kind,
    }
}

fn parse_value(token: &str, path: &Path, line: usize) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| parse_err(path, line, ParseErrorKind::InvalidNumber(token.to_string())))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, ParseErrorKind::NonFinite(token.to_string())));
    }
    Ok(v)
}

/// Non-blank lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_dims(header: &str, count: usize, path: &Path, line: usize) -> Result<Vec<usize>> {
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| parse_err(path, line, ParseErrorKind::MalformedHeader(header.to_string())))?;
    if dims.len() != count || dims.contains(&0) {
        return Err(parse_err(path, line, ParseErrorKind::MalformedHeader(header.to_string())));
    }
    Ok(dims)
}

pub fn parse_matrix(text: &str, path: &Path) -> Result<DenseMatrix> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, ParseErrorKind::MalformedHeader("empty file".into())))?;
    let dims = parse_dims(header, 2, path, hline)?;
    let (rows, cols) = (dims[0], dims[1]);
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen = 0;
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        seen += 1;
        if seen > rows {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != cols {
            return Err(parse_err(
                path,
                lineno,
                ParseErrorKind::RaggedRow {
                    expected: cols,
                    found: tokens.len(),
                },
            ));
        }
        for t in tokens {
            data.push(parse_value(t, path, lineno)?);
        }
    }
    if seen != rows {
        return Err(parse_err(
            path,
            last_line,
            ParseErrorKind::WrongLineCount {
                expected: rows,
                found: seen,
            },
        ));
    }
    DenseMatrix::new(rows, cols, data)
}

pub fn parse_vector(text: &str, path: &Path) -> Result<Vec<f64>> {
    let mut lines = content_lines(text);
    let (hline, header) = lines
        .next()
        .ok_or_else(|| parse_err(path, 1, ParseErrorKind::MalformedHeader("empty file".into())))?;
    let len = parse_dims(header, 1, path, hline)?[0];
    let mut out = Vec::with_capacity(len);
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 1 {
            return Err(parse_err(
                path,
                lineno,
                ParseErrorKind::RaggedRow {
                    expected: 1,
                    found: tokens.len(),
                },
            ));
        }
        out.push(parse_value(tokens[0], path, lineno)?);
    }
    if out.len() != len {
        return Err(parse_err(
            path,
            last_line,
            ParseErrorKind::WrongLineCount {
                expected: len,
                found: out.len(),
            },
        ));
    }
    Ok(out)
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let path = path.as_ref();
    parse_matrix(&read(path)?, path)
}

pub fn load_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    parse_vector(&read(path)?, path)
}

pub fn matrix_to_string(a: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", a.n_rows(), a.n_cols());
    for row in a.rows_iter() {
        let line: Vec<String> = row.iter().map(|v| format_f64(*v)).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out
}

pub fn vector_to_string(v: &[f64]) -> String {
    let mut out = format!("{}\n", v.len());
    for x in v {
        let _ = writeln!(out, "{}", format_f64(*x));
    }
    out
}

pub fn save_matrix(path: impl AsRef<Path>, a: &DenseMatrix) -> Result<()> {
    write_file(path.as_ref(), &matrix_to_string(a))
}

pub fn save_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    write_file(path.as_ref(), &vector_to_string(v))
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(PathBuf::from(path), e))
}
