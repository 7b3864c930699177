//! Plain-text formats.
//!
//! * cone: header `d n`, then `n` lines of `d` numbers (one generator per line)
//! * matrix: header `rows cols`, then one line per row
//! * support: header `n`, then `n` lines of `n` characters `0`/`1`
//!
//! Blank lines and text after `#` are ignored. Numbers are written with 17
//! significant digits so that parsing returns the identical `f64`.

use thiserror::Error;

use crate::linalg::Matrix;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    At { line: usize, message: String },
    #[error("unexpected end of input: {0}")]
    Truncated(String),
}

fn at(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::At { line, message: message.into() }
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((k + 1, l))
    })
}

fn parse_counts<const N: usize>(line: usize, s: &str) -> Result<[usize; N], ParseError> {
    let tokens: Vec<&str> = s.split_whitespace().collect();
    if tokens.len() != N {
        return Err(at(line, format!("expected {N} integers in the header, found {}", tokens.len())));
    }
    let mut out = [0; N];
    for (o, t) in out.iter_mut().zip(&tokens) {
        *o = t.parse().map_err(|_| at(line, format!("invalid count '{t}'")))?;
    }
    Ok(out)
}

fn parse_row(line: usize, s: &str, len: usize) -> Result<Vec<f64>, ParseError> {
    let row = s
        .split_whitespace()
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(at(line, format!("non-finite value '{t}'"))),
            Err(_) => Err(at(line, format!("invalid number '{t}'"))),
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if row.len() != len {
        return Err(at(line, format!("expected {len} values, found {}", row.len())));
    }
    Ok(row)
}

fn parse_table(text: &str, what: &str) -> Result<(usize, usize, Vec<Vec<f64>>), ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| ParseError::Truncated(format!("missing {what} header")))?;
    let [first, second] = parse_counts::<2>(hl, header)?;
    Ok((first, second, collect_rows(&mut lines, what, first, second)?))
}

fn collect_rows<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    what: &str,
    count: usize,
    len: usize,
) -> Result<Vec<Vec<f64>>, ParseError> {
    let mut rows = Vec::with_capacity(count);
    for k in 0..count {
        let (l, s) = lines.next().ok_or_else(|| ParseError::Truncated(format!("{what} has {k} of {count} rows")))?;
        rows.push(parse_row(l, s, len)?);
    }
    if let Some((l, _)) = lines.next() {
        return Err(at(l, format!("unexpected content after {count} rows")));
    }
    Ok(rows)
}

/// Returns the ambient dimension and the generators, unvalidated.
pub fn parse_cone(text: &str) -> Result<(usize, Vec<Vec<f64>>), ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| ParseError::Truncated("missing cone header".into()))?;
    let [d, n] = parse_counts::<2>(hl, header)?;
    Ok((d, collect_rows(&mut lines, "cone", n, d)?))
}

pub fn parse_matrix(text: &str) -> Result<Matrix, ParseError> {
    let (rows, cols, data) = parse_table(text, "matrix")?;
    if rows == 0 {
        return Ok(Matrix::zeros(0, cols));
    }
    Ok(Matrix::from_rows(&data).expect("rows were length-checked"))
}

pub fn parse_support(text: &str) -> Result<Vec<Vec<bool>>, ParseError> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| ParseError::Truncated("missing support header".into()))?;
    let [n] = parse_counts::<1>(hl, header)?;
    let mut rows = Vec::with_capacity(n);
    for k in 0..n {
        let (l, s) = lines.next().ok_or_else(|| ParseError::Truncated(format!("support has {k} of {n} rows")))?;
        let row: Vec<bool> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(at(l, format!("unexpected character '{other}'"))),
            })
            .collect::<Result<_, _>>()?;
        if row.len() != n {
            return Err(at(l, format!("expected {n} entries, found {}", row.len())));
        }
        rows.push(row);
    }
    if let Some((l, _)) = lines.next() {
        return Err(at(l, format!("unexpected content after {n} rows")));
    }
    Ok(rows)
}

/// 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_rows<'a>(out: &mut String, rows: impl Iterator<Item = &'a [f64]>) {
    for r in rows {
        let line: Vec<String> = r.iter().map(|&v| format_f64(v)).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
}

pub fn write_cone(dim: usize, generators: &[Vec<f64>]) -> String {
    let mut out = format!("{dim} {}\n", generators.len());
    write_rows(&mut out, generators.iter().map(Vec::as_slice));
    out
}

pub fn write_matrix(m: &Matrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    write_rows(&mut out, (0..m.rows()).map(|i| m.row(i)));
    out
}

pub fn write_support(s: &[Vec<bool>]) -> String {
    let mut out = format!("{}\n", s.len());
    for r in s {
        out.extend(r.iter().map(|&b| if b { '1' } else { '0' }));
        out.push('\n');
    }
    out
}
