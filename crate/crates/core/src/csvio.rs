//! Headerless comma-separated matrices, one row per line.

use num_complex::Complex64;

use crate::cmatrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::FieldMatrix;

fn parse_rows<T>(text: &str, mut parse: impl FnMut(&str) -> Option<T>) -> Result<Vec<Vec<T>>> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|cell| {
                parse(cell.trim()).ok_or_else(|| Error::Parse(format!("line {}: bad value {:?}", n + 1, cell.trim())))
            })
            .collect::<Result<Vec<T>>>()?;
        if let Some(first) = rows.first().map(Vec::len) {
            if row.len() != first {
                return Err(Error::Shape(format!("line {} has {} values, expected {first}", n + 1, row.len())));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("no rows".into()));
    }
    Ok(rows)
}

/// Integers (possibly negative) reduced into the field.
pub fn parse_field_matrix(text: &str, field: &PrimeField) -> Result<FieldMatrix> {
    let rows = parse_rows(text, |s| {
        s.parse::<i64>().ok().map(|v| field.from_i64(v)).or_else(|| s.parse::<u64>().ok().map(|v| field.elem(v)))
    })?;
    let cols = rows[0].len();
    FieldMatrix::from_vec(rows.len(), cols, rows.into_iter().flatten().collect())
}

pub fn format_field_matrix(m: &FieldMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| v.value().to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn parse_real_matrix(text: &str) -> Result<ComplexMatrix> {
    let rows = parse_rows(text, |s| s.parse::<f64>().ok().filter(|v| v.is_finite()))?;
    ComplexMatrix::from_real_rows(&rows)
}

/// Real parts only; callers check the imaginary parts are negligible.
pub fn format_real_parts(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|z: &Complex64| z.re.to_string()).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// A vector written either as one row or as one value per line.
pub fn parse_vector(text: &str) -> Result<Vec<f64>> {
    let rows = parse_rows(text, |s| s.parse::<f64>().ok().filter(|v| v.is_finite()));
    match rows {
        Ok(rows) if rows.len() == 1 || rows[0].len() == 1 => Ok(rows.into_iter().flatten().collect()),
        Ok(rows) => Err(Error::Shape(format!("expected a vector, got {}x{}", rows.len(), rows[0].len()))),
        Err(e) => Err(e),
    }
}

pub fn format_vector(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}\n")).collect()
}
