//! Row-separation and diversity measures for coding matrices.
//!
//! Two code-row distances drive both matrix selection and decoding:
//!
//! * **Hamming** (generalized): per position, 0 when both entries are
//!   equal and non-zero, 1 when they differ and are both non-zero, and
//!   0.5 when either entry is 0 (a "don't care" match is half credit).
//! * **Absolute**: per position, `|a - b|`, which rewards group ids
//!   that are numerically far apart.
//!
//! Larger minimum row separation `rho` tolerates more base-task errors:
//! decoding corrects any code word within `rho / 2` of its class row.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::coding::{CodingMatrix, Scheme};
use crate::error::{EcocError, Result};

/// Distance used to compare code rows and to decode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distance {
    Hamming,
    Absolute,
}

impl Distance {
    /// Stable lowercase name used in CLI flags and report files.
    pub fn name(&self) -> &'static str {
        match self {
            Distance::Hamming => "hamming",
            Distance::Absolute => "absolute",
        }
    }

    /// Parses the stable name produced by [`Distance::name`].
    pub fn parse(name: &str) -> Result<Distance> {
        match name {
            "hamming" => Ok(Distance::Hamming),
            "absolute" => Ok(Distance::Absolute),
            other => Err(EcocError::InvalidParameters(format!(
                "unknown distance `{other}` (expected hamming or absolute)"
            ))),
        }
    }
}

impl fmt::Display for Distance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Distance contributed by a single code position.
pub fn position_distance(distance: Distance, a: i32, b: i32) -> f64 {
    match distance {
        Distance::Hamming => {
            if a == 0 || b == 0 {
                0.5
            } else if a == b {
                0.0
            } else {
                1.0
            }
        }
        Distance::Absolute => (a as f64 - b as f64).abs(),
    }
}

/// Generalized Hamming distance between two equal-length code words.
pub fn hamming_distance(a: &[i32], b: &[i32]) -> Result<f64> {
    row_distance(Distance::Hamming, a, b)
}

/// Absolute distance between two equal-length code words.
pub fn absolute_distance(a: &[i32], b: &[i32]) -> Result<f64> {
    row_distance(Distance::Absolute, a, b)
}

/// Sum of [`position_distance`] over all positions.
pub fn row_distance(distance: Distance, a: &[i32], b: &[i32]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(EcocError::LengthMismatch { left: a.len(), right: b.len() });
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| position_distance(distance, x, y))
        .sum())
}

/// Minimum pairwise row distance of a matrix (its separation `rho`).
pub fn min_row_distance(matrix: &CodingMatrix, distance: Distance) -> f64 {
    let mut best = f64::INFINITY;
    for a in 0..matrix.n_classes() {
        for b in (a + 1)..matrix.n_classes() {
            let d = row_distance(distance, matrix.row(a), matrix.row(b))
                .expect("matrix rows have equal length");
            if d < best {
                best = d;
            }
        }
    }
    best
}

/// Mean pairwise row distance of a matrix.
pub fn mean_row_distance(matrix: &CodingMatrix, distance: Distance) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for a in 0..matrix.n_classes() {
        for b in (a + 1)..matrix.n_classes() {
            sum += row_distance(distance, matrix.row(a), matrix.row(b))
                .expect("matrix rows have equal length");
            pairs += 1;
        }
    }
    sum / pairs as f64
}

/// Expected Hamming distance between two independent uniform random
/// code words over `{1..n}`: `code_length * (1 - 1/n)`.
pub fn expected_hamming(n: u32, code_length: usize) -> Result<f64> {
    if n < 1 {
        return Err(EcocError::InvalidParameters(
            "group count n must be at least 1".to_string(),
        ));
    }
    Ok(code_length as f64 * (1.0 - 1.0 / n as f64))
}

/// Expected absolute distance between two independent uniform random
/// code words over `{1..n}`: `code_length * (n^2 - 1) / (3n)`.
pub fn expected_absolute(n: u32, code_length: usize) -> Result<f64> {
    if n < 1 {
        return Err(EcocError::InvalidParameters(
            "group count n must be at least 1".to_string(),
        ));
    }
    let nf = n as f64;
    Ok(code_length as f64 * (nf * nf - 1.0) / (3.0 * nf))
}

/// Closed-form row separation per scheme.
///
/// One-vs-all and one-vs-one have exact minimum distances; random
/// schemes are characterized by their expected row distance instead.
pub fn closed_form_distance(
    scheme: Scheme,
    n_classes: usize,
    code_length: usize,
    n: u32,
    distance: Distance,
) -> Result<f64> {
    if n_classes < 2 {
        return Err(EcocError::InvalidParameters(
            "n_classes must be at least 2".to_string(),
        ));
    }
    let value = match (scheme, distance) {
        (Scheme::Ova, Distance::Hamming) => 2.0,
        (Scheme::Ova, Distance::Absolute) => 4.0,
        (Scheme::Ovo, Distance::Hamming) => {
            let pairs = n_classes * (n_classes - 1) / 2;
            (pairs as f64 - 1.0) / 2.0 + 1.0
        }
        (Scheme::Ovo, Distance::Absolute) => 2.0 * n_classes as f64 - 2.0,
        (Scheme::DenseRandom | Scheme::SparseRandom, Distance::Hamming) => {
            code_length as f64 / 2.0
        }
        (Scheme::DenseRandom | Scheme::SparseRandom, Distance::Absolute) => code_length as f64,
        (Scheme::Nary, Distance::Hamming) => expected_hamming(n, code_length)?,
        (Scheme::Nary, Distance::Absolute) => expected_absolute(n, code_length)?,
    };
    Ok(value)
}

/// Pearson correlation of two equal-length vectors, `None` when either
/// has zero variance.
pub(crate) fn pearson(u: &[f64], v: &[f64]) -> Option<f64> {
    let len = u.len() as f64;
    let mu = u.iter().sum::<f64>() / len;
    let mv = v.iter().sum::<f64>() / len;
    let mut cov = 0.0;
    let mut var_u = 0.0;
    let mut var_v = 0.0;
    for (&x, &y) in u.iter().zip(v.iter()) {
        let dx = x - mu;
        let dy = y - mv;
        cov += dx * dy;
        var_u += dx * dx;
        var_v += dy * dy;
    }
    if var_u <= 0.0 || var_v <= 0.0 {
        return None;
    }
    Some(cov / libm::sqrt(var_u * var_v))
}

/// Separation and diversity summary of a coding matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixReport {
    /// Minimum pairwise Hamming row distance.
    pub rho_hamming: f64,
    /// Minimum pairwise absolute row distance.
    pub rho_absolute: f64,
    /// Mean pairwise Hamming row distance.
    pub mean_hamming: f64,
    /// Mean pairwise absolute row distance.
    pub mean_absolute: f64,
    /// Expected Hamming distance for random codes of this shape;
    /// only defined for the n-ary scheme.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_hamming: Option<f64>,
    /// Expected absolute distance; only defined for the n-ary scheme.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_absolute: Option<f64>,
    /// Mean absolute Pearson correlation over non-constant column
    /// pairs, each computed on the classes both columns include (both
    /// entries nonzero). Pairs sharing fewer than two classes or with
    /// no variance on the shared classes are skipped; 0 when no pair
    /// qualifies. Lower means the base tasks are more diverse.
    pub mean_column_pcc: f64,
    /// Columns whose entries are all identical and therefore excluded
    /// from the correlation average.
    pub constant_columns: Vec<usize>,
}

/// Computes separation and column-diversity statistics for a matrix.
pub fn matrix_report(matrix: &CodingMatrix) -> MatrixReport {
    let (expected_h, expected_a) = if matrix.scheme() == Scheme::Nary {
        (
            Some(expected_hamming(matrix.n(), matrix.code_length()).expect("n >= 2")),
            Some(expected_absolute(matrix.n(), matrix.code_length()).expect("n >= 2")),
        )
    } else {
        (None, None)
    };

    let columns: Vec<Vec<f64>> = (0..matrix.code_length())
        .map(|s| (0..matrix.n_classes()).map(|r| matrix.value(r, s) as f64).collect())
        .collect();
    let constant_columns: Vec<usize> = columns
        .iter()
        .enumerate()
        .filter(|(_, col)| col.iter().all(|&v| v == col[0]))
        .map(|(s, _)| s)
        .collect();

    let mut pcc_sum = 0.0;
    let mut pcc_pairs = 0usize;
    for s in 0..columns.len() {
        for t in (s + 1)..columns.len() {
            if constant_columns.contains(&s) || constant_columns.contains(&t) {
                continue;
            }
            // A zero entry excludes its class from the column's task,
            // so redundancy between two tasks is measured over the
            // classes both of them include.
            let mut u = Vec::new();
            let mut v = Vec::new();
            for r in 0..matrix.n_classes() {
                let (a, b) = (columns[s][r], columns[t][r]);
                if a != 0.0 && b != 0.0 {
                    u.push(a);
                    v.push(b);
                }
            }
            if u.len() < 2 {
                continue;
            }
            if let Some(r) = pearson(&u, &v) {
                pcc_sum += r.abs();
                pcc_pairs += 1;
            }
        }
    }
    let mean_column_pcc = if pcc_pairs == 0 { 0.0 } else { pcc_sum / pcc_pairs as f64 };

    MatrixReport {
        rho_hamming: min_row_distance(matrix, Distance::Hamming),
        rho_absolute: min_row_distance(matrix, Distance::Absolute),
        mean_hamming: mean_row_distance(matrix, Distance::Hamming),
        mean_absolute: mean_row_distance(matrix, Distance::Absolute),
        expected_hamming: expected_h,
        expected_absolute: expected_a,
        mean_column_pcc,
        constant_columns,
    }
}

/// Data-dependent generalization bound of a trained ensemble.
///
/// `b_bar` is the mean per-column training loss under the decoding
/// distance (for Hamming decoding it is the mean column error rate),
/// `rho` the row separation over active columns, and the bound is
/// `2 * n_columns * b_bar / rho` where `n_columns` counts the columns
/// that contributed a loss estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    /// Mean of `b_per_column`.
    pub b_bar: f64,
    /// Mean distance-loss per contributing column, in column order.
    pub b_per_column: Vec<f64>,
    /// Minimum pairwise row distance over active columns.
    pub rho: f64,
    /// The loss bound `2 * n_columns * b_bar / rho`.
    pub bound: f64,
    /// Columns without a loss estimate: degenerate columns and columns
    /// whose entry is 0 for every instance's class.
    pub excluded_columns: Vec<usize>,
}

/// Estimates the generalization bound of an ensemble on labeled data.
///
/// Fails with an undefined bound when the active-column separation is
/// zero or no column has applicable instances.
pub fn bound_report(
    model: &crate::ensemble::EcocModel,
    data: &crate::datasets::Dataset,
) -> Result<BoundReport> {
    let matrix = &model.matrix;
    for &label in &data.labels {
        if label < 1 || label as usize > matrix.n_classes() {
            return Err(EcocError::LabelOutOfRange {
                label: label as i64,
                n_classes: matrix.n_classes() as u32,
            });
        }
    }
    let rho = model.rho();
    if !(rho > 0.0) {
        return Err(EcocError::UndefinedBound);
    }
    let codes = crate::ensemble::predict_codes(model, &data.features)?;

    let mut b_per_column = Vec::new();
    let mut excluded_columns = model.degenerate_columns();
    for s in model.active_columns() {
        let mut loss = 0.0;
        let mut applicable = 0usize;
        for (i, &label) in data.labels.iter().enumerate() {
            let truth = matrix.value(label as usize - 1, s);
            if truth == 0 {
                continue;
            }
            loss += position_distance(model.decoding, truth, codes[i][s]);
            applicable += 1;
        }
        if applicable == 0 {
            excluded_columns.push(s);
        } else {
            b_per_column.push(loss / applicable as f64);
        }
    }
    excluded_columns.sort_unstable();
    if b_per_column.is_empty() {
        return Err(EcocError::UndefinedBound);
    }
    let n_columns = b_per_column.len() as f64;
    let b_bar = b_per_column.iter().sum::<f64>() / n_columns;
    let bound = 2.0 * n_columns * b_bar / rho;
    Ok(BoundReport { b_bar, b_per_column, rho, bound, excluded_columns })
}
