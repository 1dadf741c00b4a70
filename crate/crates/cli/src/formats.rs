//! Plain-text matrix and basis files.
//!
//! ```text
//! dim 2
//! 0+0i   0.5-1i
//! 0.5+1i 2
//! ```
//!
//! A basis file starts with `vectors k` followed by `k` rows of `dim`
//! entries. Entries are `a+bi` as accepted by `num_complex`; blank lines and
//! lines starting with `#` are skipped.

use std::fmt::Write as _;

use num_complex::Complex64;
use subqsl_core::linalg::ComplexMatrix;

type Rows = Vec<Vec<Complex64>>;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_rows(text: &str, keyword: &str, width: Option<usize>) -> Result<Rows, String> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| format!("empty file; expected \"{keyword} n\""))?;
    let count = match header.split_whitespace().collect::<Vec<_>>()[..] {
        [k, n] if k == keyword => n.parse::<usize>().map_err(|e| format!("line {line}: bad count {n:?}: {e}"))?,
        _ => return Err(format!("line {line}: expected \"{keyword} n\", found {header:?}")),
    };
    if count == 0 {
        return Err(format!("line {line}: {keyword} must be positive"));
    }
    let width = width.unwrap_or(count);
    let mut rows = Vec::with_capacity(count);
    for (line, text) in lines.by_ref().take(count) {
        let row = text
            .split_whitespace()
            .map(|tok| tok.parse::<Complex64>().map_err(|e| format!("line {line}: bad entry {tok:?}: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != width {
            return Err(format!("line {line}: expected {width} entries, found {}", row.len()));
        }
        if row.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(format!("line {line}: non-finite entry"));
        }
        rows.push(row);
    }
    if rows.len() != count {
        return Err(format!("expected {count} rows, found {}", rows.len()));
    }
    if let Some((line, _)) = lines.next() {
        return Err(format!("line {line}: unexpected content after {count} rows"));
    }
    Ok(rows)
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, String> {
    let rows = parse_rows(text, "dim", None)?;
    let n = rows.len();
    ComplexMatrix::from_row_major(n, n, rows.into_iter().flatten().collect()).map_err(|e| e.to_string())
}

pub fn parse_basis(text: &str, dim: usize) -> Result<Rows, String> {
    parse_rows(text, "vectors", Some(dim))
}

fn entry(z: Complex64) -> String {
    // `{:?}` gives the shortest representation that parses back exactly.
    if z.im.is_sign_negative() {
        format!("{:?}-{:?}i", z.re, -z.im)
    } else {
        format!("{:?}+{:?}i", z.re, z.im)
    }
}

pub fn write_matrix(m: &ComplexMatrix) -> String {
    let mut out = format!("dim {}\n", m.rows());
    for i in 0..m.rows() {
        let row: Vec<String> = (0..m.cols()).map(|j| entry(m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn write_basis(vectors: &[Vec<Complex64>]) -> String {
    let mut out = format!("vectors {}\n", vectors.len());
    for v in vectors {
        let row: Vec<String> = v.iter().map(|&z| entry(z)).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}
