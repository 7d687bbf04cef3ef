//! Sparse `label index:value` dataset format.
//!
//! One instance per line: an integer label followed by whitespace-
//! separated `index:value` pairs with 1-based feature indices. Omitted
//! indices are zero. `#` starts a comment that runs to the end of the
//! line. Raw labels may be any integers; they are remapped to
//! contiguous `1..=K` in sorted order and remembered in the dataset's
//! `label_map`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nary_ecoc_core::datasets::{from_raw_labels, Dataset, Features};

use crate::error::{AppError, Result};

/// Loads a sparse dataset; the feature dimension is the largest index
/// seen anywhere in the file.
pub fn load_sparse(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let mut raw_labels: Vec<i64> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0usize;

    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let label_token = tokens.next().expect("non-empty line has a first token");
        let label: i64 = label_token.parse().map_err(|_| {
            AppError::parse(path, line_no, format!("bad label `{label_token}`"))
        })?;

        let mut row: Vec<(usize, f64)> = Vec::new();
        for token in tokens {
            let (idx, value) = token.split_once(':').ok_or_else(|| {
                AppError::parse(path, line_no, format!("expected `index:value`, got `{token}`"))
            })?;
            let idx: usize = idx.parse().map_err(|_| {
                AppError::parse(path, line_no, format!("bad feature index `{idx}`"))
            })?;
            if idx == 0 {
                return Err(AppError::parse(path, line_no, "feature indices are 1-based"));
            }
            let value: f64 = value.parse().map_err(|_| {
                AppError::parse(path, line_no, format!("bad feature value `{value}`"))
            })?;
            if !value.is_finite() {
                return Err(AppError::parse(
                    path,
                    line_no,
                    format!("non-finite feature value `{value}`"),
                ));
            }
            if row.iter().any(|&(i, _)| i == idx) {
                return Err(AppError::parse(
                    path,
                    line_no,
                    format!("feature index {idx} appears twice"),
                ));
            }
            dim = dim.max(idx);
            row.push((idx, value));
        }
        raw_labels.push(label);
        rows.push(row);
    }

    if rows.is_empty() {
        return Err(AppError::parse(path, 1, "file contains no instances"));
    }
    if dim == 0 {
        return Err(AppError::parse(path, 1, "file contains no features"));
    }

    let mut data = vec![0.0; rows.len() * dim];
    for (r, row) in rows.iter().enumerate() {
        for &(idx, value) in row {
            data[r * dim + idx - 1] = value;
        }
    }
    let features = Features::new(data, rows.len(), dim)
        .map_err(|e| AppError::parse(path, 1, e.to_string()))?;
    from_raw_labels(features, &raw_labels).map_err(|e| AppError::parse(path, 1, e.to_string()))
}

/// Writes a dataset in sparse format, using the raw labels from its
/// `label_map` and omitting zero features.
pub fn write_sparse(path: &Path, data: &Dataset) -> Result<()> {
    let mut out = String::new();
    for i in 0..data.n_instances() {
        let raw = data.label_map[data.labels[i] as usize - 1];
        write!(out, "{raw}").expect("writing to a string cannot fail");
        for (j, &value) in data.features.row(i).iter().enumerate() {
            if value != 0.0 {
                write!(out, " {}:{}", j + 1, value).expect("writing to a string cannot fail");
            }
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| AppError::io(path, e))
}
