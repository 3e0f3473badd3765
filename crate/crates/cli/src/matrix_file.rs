//! `{"rows": n, "cols": n, "data": [[re, im], ...]}` with row-major entries.

use std::fmt;
use std::path::Path;

use quasiherm::linalg::{c64, ComplexMatrix};
use serde::Deserialize;

use crate::json::Json;

#[derive(Debug, Deserialize)]
struct RawMatrix {
    rows: usize,
    cols: usize,
    data: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, ParseError> {
    let raw: RawMatrix = serde_json::from_str(text)
        .map_err(|e| ParseError(format!("malformed matrix file: {e}")))?;
    if raw.rows != raw.cols {
        return Err(ParseError(format!(
            "matrix must be square, got {}x{}",
            raw.rows, raw.cols
        )));
    }
    if raw.data.len() != raw.rows * raw.cols {
        return Err(ParseError(format!(
            "expected {} entries, found {}",
            raw.rows * raw.cols,
            raw.data.len()
        )));
    }
    Ok(ComplexMatrix::from_row_iterator(
        raw.rows,
        raw.cols,
        raw.data.iter().map(|[re, im]| c64(*re, *im)),
    ))
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, ParseError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ParseError(format!("cannot read {}: {e}", path.display())))?;
    parse_matrix(&text).map_err(|e| ParseError(format!("{}: {e}", path.display())))
}

pub fn matrix_json(m: &ComplexMatrix) -> Json {
    let mut data = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            data.push(Json::reals(&[z.re, z.im]));
        }
    }
    Json::object([
        ("rows", Json::Int(m.nrows() as i64)),
        ("cols", Json::Int(m.ncols() as i64)),
        ("data", Json::Array(data)),
    ])
}

pub fn format_matrix(m: &ComplexMatrix) -> String {
    matrix_json(m).to_pretty()
}
