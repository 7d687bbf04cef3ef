//! Dense CSV dataset format.
//!
//! Every row is one instance; one column carries the integer class
//! label and all other columns are numeric features. Raw labels are
//! remapped to contiguous `1..=K` in sorted order.

use std::fs;
use std::path::Path;

use nary_ecoc_core::datasets::{from_raw_labels, Dataset, Features};

use crate::error::{AppError, Result};

/// Which CSV column holds the class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelColumn {
    /// The last column (the default).
    Last,
    /// A 0-based column index.
    Index(usize),
}

/// Loads a dense CSV dataset.
///
/// With `has_header` the first line is skipped. Cells are trimmed, so
/// `1, 2.5, 3` parses fine.
pub fn load_csv(path: &Path, label_col: LabelColumn, has_header: bool) -> Result<Dataset> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    let mut raw_labels: Vec<i64> = Vec::new();
    let mut data: Vec<f64> = Vec::new();
    let mut n_cols: Option<usize> = None;

    for (index, line) in text.lines().enumerate() {
        let line_no = index + 1;
        if has_header && index == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        match n_cols {
            None => {
                if cells.len() < 2 {
                    return Err(AppError::parse(
                        path,
                        line_no,
                        "rows need at least one feature and a label column",
                    ));
                }
                n_cols = Some(cells.len());
            }
            Some(expected) if cells.len() != expected => {
                return Err(AppError::parse(
                    path,
                    line_no,
                    format!("row has {} columns, expected {expected}", cells.len()),
                ));
            }
            _ => {}
        }
        let label_index = match label_col {
            LabelColumn::Last => cells.len() - 1,
            LabelColumn::Index(i) => {
                if i >= cells.len() {
                    return Err(AppError::parse(
                        path,
                        line_no,
                        format!("label column {i} out of range for {} columns", cells.len()),
                    ));
                }
                i
            }
        };
        for (c, cell) in cells.iter().enumerate() {
            if c == label_index {
                let label: i64 = cell.parse().map_err(|_| {
                    AppError::parse(path, line_no, format!("bad label `{cell}`"))
                })?;
                raw_labels.push(label);
            } else {
                let value: f64 = cell.parse().map_err(|_| {
                    AppError::parse(path, line_no, format!("bad feature value `{cell}`"))
                })?;
                if !value.is_finite() {
                    return Err(AppError::parse(
                        path,
                        line_no,
                        format!("non-finite feature value `{cell}`"),
                    ));
                }
                data.push(value);
            }
        }
    }

    if raw_labels.is_empty() {
        return Err(AppError::parse(path, 1, "file contains no instances"));
    }
    let n_cols = n_cols.expect("instances imply a column count") - 1;
    let features = Features::new(data, raw_labels.len(), n_cols)
        .map_err(|e| AppError::parse(path, 1, e.to_string()))?;
    from_raw_labels(features, &raw_labels).map_err(|e| AppError::parse(path, 1, e.to_string()))
}
