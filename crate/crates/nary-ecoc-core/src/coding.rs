//! Coding-matrix construction and selection.
//!
//! A coding matrix has one row per class and one column per base task.
//! Signed schemes (one-vs-all, one-vs-one, dense and sparse random) use
//! the alphabet `{-1, 0, +1}`, where 0 marks classes a column ignores.
//! The N-ary scheme assigns every class one of `N` group ids in `{1..N}`,
//! so each column induces an N-class subproblem instead of a binary one.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{EcocError, Result};
use crate::metrics::{self, Distance};

/// Retry budget for resampling a single invalid column.
const COLUMN_RETRIES: usize = 100;
/// Retry budget for regenerating a whole matrix with duplicate rows.
const MATRIX_RETRIES: usize = 100;

/// Coding scheme for a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// One-vs-all: square matrix, +1 on the diagonal, -1 elsewhere.
    Ova,
    /// One-vs-one: one column per class pair, +1/-1 for the pair, 0 elsewhere.
    Ovo,
    /// Uniformly random entries in {-1, +1}.
    DenseRandom,
    /// Random ternary entries with P(0) = 1/2, P(+1) = P(-1) = 1/4.
    SparseRandom,
    /// Uniformly random entries in {1..N}.
    Nary,
}

impl Scheme {
    /// Stable lowercase name used in file headers and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Ova => "ova",
            Scheme::Ovo => "ovo",
            Scheme::DenseRandom => "dense",
            Scheme::SparseRandom => "sparse",
            Scheme::Nary => "nary",
        }
    }

    /// Parses the stable name produced by [`Scheme::name`].
    pub fn parse(name: &str) -> Result<Scheme> {
        match name {
            "ova" => Ok(Scheme::Ova),
            "ovo" => Ok(Scheme::Ovo),
            "dense" => Ok(Scheme::DenseRandom),
            "sparse" => Ok(Scheme::SparseRandom),
            "nary" => Ok(Scheme::Nary),
            other => Err(EcocError::InvalidParameters(format!(
                "unknown scheme `{other}` (expected ova, ovo, dense, sparse, or nary)"
            ))),
        }
    }

    /// True for schemes over the signed alphabet {-1, 0, +1}.
    pub fn is_signed(&self) -> bool {
        !matches!(self, Scheme::Nary)
    }

    /// Whether generation consumes the seed.
    pub fn is_random(&self) -> bool {
        matches!(self, Scheme::DenseRandom | Scheme::SparseRandom | Scheme::Nary)
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A validated class-to-group coding matrix.
///
/// Immutable after construction; shared freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodingMatrix {
    entries: Vec<i32>,
    n_classes: usize,
    code_length: usize,
    scheme: Scheme,
    n: u32,
    seed: u64,
}

impl CodingMatrix {
    /// Builds a matrix from row-major entries, checking every invariant:
    /// shape, per-scheme alphabet, row distinctness, and that each column
    /// carries at least two distinct non-zero values.
    pub fn new(
        entries: Vec<i32>,
        n_classes: usize,
        code_length: usize,
        scheme: Scheme,
        n: u32,
        seed: u64,
    ) -> Result<CodingMatrix> {
        if n_classes < 2 {
            return Err(EcocError::InvalidParameters(
                "a coding matrix needs at least 2 classes".to_string(),
            ));
        }
        if code_length < 1 {
            return Err(EcocError::InvalidParameters(
                "a coding matrix needs at least 1 column".to_string(),
            ));
        }
        if entries.len() != n_classes * code_length {
            return Err(EcocError::InvalidParameters(format!(
                "entry count {} does not match shape {}x{}",
                entries.len(),
                n_classes,
                code_length
            )));
        }
        let matrix = CodingMatrix { entries, n_classes, code_length, scheme, n, seed };
        matrix.validate()?;
        Ok(matrix)
    }

    fn validate(&self) -> Result<()> {
        match self.scheme {
            Scheme::Nary => {
                if self.n < 2 {
                    return Err(EcocError::InvariantViolation(
                        "n-ary matrices need n >= 2".to_string(),
                    ));
                }
                for &v in &self.entries {
                    if v < 1 || v > self.n as i32 {
                        return Err(EcocError::InvariantViolation(format!(
                            "entry {v} outside n-ary alphabet 1..={}",
                            self.n
                        )));
                    }
                }
            }
            Scheme::Ova | Scheme::DenseRandom => {
                if self.n != 2 {
                    return Err(EcocError::InvariantViolation(
                        "signed schemes have group count 2".to_string(),
                    ));
                }
                for &v in &self.entries {
                    if v != -1 && v != 1 {
                        return Err(EcocError::InvariantViolation(format!(
                            "entry {v} outside binary alphabet {{-1, +1}}"
                        )));
                    }
                }
            }
            Scheme::Ovo | Scheme::SparseRandom => {
                if self.n != 2 {
                    return Err(EcocError::InvariantViolation(
                        "signed schemes have group count 2".to_string(),
                    ));
                }
                for &v in &self.entries {
                    if !(-1..=1).contains(&v) {
                        return Err(EcocError::InvariantViolation(format!(
                            "entry {v} outside ternary alphabet {{-1, 0, +1}}"
                        )));
                    }
                }
            }
        }
        if self.scheme == Scheme::Ova {
            if self.code_length != self.n_classes {
                return Err(EcocError::InvariantViolation(
                    "one-vs-all matrices are square".to_string(),
                ));
            }
            for r in 0..self.n_classes {
                for s in 0..self.code_length {
                    let expect = if r == s { 1 } else { -1 };
                    if self.value(r, s) != expect {
                        return Err(EcocError::InvariantViolation(format!(
                            "one-vs-all structure broken at ({r}, {s})"
                        )));
                    }
                }
            }
        }
        if self.scheme == Scheme::Ovo {
            let pairs = self.n_classes * (self.n_classes - 1) / 2;
            if self.code_length != pairs {
                return Err(EcocError::InvariantViolation(format!(
                    "one-vs-one matrices have C(n_classes, 2) = {pairs} columns"
                )));
            }
            for s in 0..self.code_length {
                let mut pos = 0usize;
                let mut neg = 0usize;
                for r in 0..self.n_classes {
                    match self.value(r, s) {
                        1 => pos += 1,
                        -1 => neg += 1,
                        _ => {}
                    }
                }
                if pos != 1 || neg != 1 {
                    return Err(EcocError::InvariantViolation(format!(
                        "one-vs-one column {s} must have exactly one +1 and one -1"
                    )));
                }
            }
        }
        for s in 0..self.code_length {
            if !column_is_valid((0..self.n_classes).map(|r| self.value(r, s))) {
                return Err(EcocError::InvariantViolation(format!(
                    "column {s} has fewer than 2 distinct non-zero values"
                )));
            }
        }
        for a in 0..self.n_classes {
            for b in (a + 1)..self.n_classes {
                if self.row(a) == self.row(b) {
                    return Err(EcocError::InvariantViolation(format!(
                        "rows {a} and {b} are identical"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of classes (rows).
    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// Code length (columns / base tasks).
    pub fn code_length(&self) -> usize {
        self.code_length
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Group count per column: 2 for signed schemes, N for the N-ary scheme.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Seed the matrix was generated from (0 for deterministic schemes).
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Entry at (row, column).
    pub fn value(&self, row: usize, col: usize) -> i32 {
        self.entries[row * self.code_length + col]
    }

    /// Code row for one class (0-based row index).
    pub fn row(&self, row: usize) -> &[i32] {
        &self.entries[row * self.code_length..(row + 1) * self.code_length]
    }

    /// Group id for a matrix entry: -1 maps to 1, +1 maps to 2, n-ary
    /// values map to themselves. Zero (don't care) has no group.
    pub fn group_of_entry(&self, value: i32) -> Option<u32> {
        if self.scheme.is_signed() {
            match value {
                -1 => Some(1),
                1 => Some(2),
                _ => None,
            }
        } else if value >= 1 {
            Some(value as u32)
        } else {
            None
        }
    }

    /// Matrix entry for a group id; inverse of [`Self::group_of_entry`].
    pub fn entry_of_group(&self, group: u32) -> i32 {
        if self.scheme.is_signed() {
            if group == 1 {
                -1
            } else {
                1
            }
        } else {
            group as i32
        }
    }
}

fn column_is_valid(values: impl Iterator<Item = i32>) -> bool {
    let mut distinct: Vec<i32> = Vec::new();
    for v in values {
        if v != 0 && !distinct.contains(&v) {
            distinct.push(v);
            if distinct.len() >= 2 {
                return true;
            }
        }
    }
    false
}

/// Default code length per scheme: fixed for one-vs-all and one-vs-one,
/// `ceil(10 log2 N_C)` for dense random, `ceil(15 log2 N_C)` for sparse
/// random, and `N_C (N_C - 1) / 2` for N-ary codes.
pub fn default_code_length(scheme: Scheme, n_classes: usize) -> usize {
    let log2 = libm::log2(n_classes as f64);
    match scheme {
        Scheme::Ova => n_classes,
        Scheme::Ovo => n_classes * (n_classes - 1) / 2,
        Scheme::DenseRandom => libm::ceil(10.0 * log2) as usize,
        Scheme::SparseRandom => libm::ceil(15.0 * log2) as usize,
        Scheme::Nary => n_classes * (n_classes - 1) / 2,
    }
}

/// Generates a coding matrix.
///
/// Deterministic schemes (one-vs-all, one-vs-one) ignore `code_length`,
/// `n`, and `seed`. Random schemes resample any invalid column and
/// regenerate the whole matrix if two rows collide, each within a fixed
/// retry budget, and are a pure function of their parameters and seed.
pub fn generate(
    scheme: Scheme,
    n_classes: usize,
    code_length: usize,
    n: u32,
    seed: u64,
) -> Result<CodingMatrix> {
    if n_classes < 2 {
        return Err(EcocError::InvalidParameters(
            "n_classes must be at least 2".to_string(),
        ));
    }
    match scheme {
        Scheme::Ova => generate_ova(n_classes),
        Scheme::Ovo => generate_ovo(n_classes),
        Scheme::DenseRandom | Scheme::SparseRandom => {
            generate_random(scheme, n_classes, code_length, 2, seed)
        }
        Scheme::Nary => {
            if n < 2 || n as usize > n_classes {
                return Err(EcocError::InvalidParameters(format!(
                    "n-ary group count must satisfy 2 <= n <= n_classes, got n={n}, n_classes={n_classes}"
                )));
            }
            generate_random(scheme, n_classes, code_length, n, seed)
        }
    }
}

fn generate_ova(n_classes: usize) -> Result<CodingMatrix> {
    let mut entries = vec![-1i32; n_classes * n_classes];
    for r in 0..n_classes {
        entries[r * n_classes + r] = 1;
    }
    CodingMatrix::new(entries, n_classes, n_classes, Scheme::Ova, 2, 0)
}

fn generate_ovo(n_classes: usize) -> Result<CodingMatrix> {
    let code_length = n_classes * (n_classes - 1) / 2;
    let mut entries = vec![0i32; n_classes * code_length];
    let mut s = 0;
    for i in 0..n_classes {
        for j in (i + 1)..n_classes {
            entries[i * code_length + s] = 1;
            entries[j * code_length + s] = -1;
            s += 1;
        }
    }
    CodingMatrix::new(entries, n_classes, code_length, Scheme::Ovo, 2, 0)
}

fn sample_entry<R: Rng>(rng: &mut R, scheme: Scheme, n: u32) -> i32 {
    match scheme {
        Scheme::DenseRandom => {
            if rng.gen_range(0..2u8) == 0 {
                -1
            } else {
                1
            }
        }
        Scheme::SparseRandom => match rng.gen_range(0..4u8) {
            0 | 1 => 0,
            2 => -1,
            _ => 1,
        },
        Scheme::Nary => rng.gen_range(1..=n) as i32,
        _ => unreachable!("deterministic schemes are not sampled"),
    }
}

fn generate_random(
    scheme: Scheme,
    n_classes: usize,
    code_length: usize,
    n: u32,
    seed: u64,
) -> Result<CodingMatrix> {
    if code_length < 1 {
        return Err(EcocError::InvalidParameters(
            "code_length must be at least 1".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut column = vec![0i32; n_classes];
    for _ in 0..MATRIX_RETRIES {
        let mut entries = vec![0i32; n_classes * code_length];
        for s in 0..code_length {
            let mut ok = false;
            for _ in 0..COLUMN_RETRIES {
                for slot in column.iter_mut() {
                    *slot = sample_entry(&mut rng, scheme, n);
                }
                if column_is_valid(column.iter().copied()) {
                    ok = true;
                    break;
                }
            }
            if !ok {
                return Err(EcocError::GenerationFailure(format!(
                    "no valid column after {COLUMN_RETRIES} attempts (scheme {scheme}, n_classes {n_classes})"
                )));
            }
            for (r, &v) in column.iter().enumerate() {
                entries[r * code_length + s] = v;
            }
        }
        let distinct = (0..n_classes).all(|a| {
            ((a + 1)..n_classes).all(|b| {
                entries[a * code_length..(a + 1) * code_length]
                    != entries[b * code_length..(b + 1) * code_length]
            })
        });
        if distinct {
            return CodingMatrix::new(entries, n_classes, code_length, scheme, n, seed);
        }
    }
    Err(EcocError::GenerationFailure(format!(
        "no duplicate-free matrix after {MATRIX_RETRIES} attempts (scheme {scheme})"
    )))
}

/// Seed of the k-th pool member scanned by [`select_best`].
pub fn pool_member_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add(k as u64)
}

/// Generates `pool_size` matrices and keeps the one with the largest
/// minimum pairwise absolute row distance, breaking ties by generation
/// order. A pool of one is identical to [`generate`] with the same seed.
pub fn select_best(
    scheme: Scheme,
    n_classes: usize,
    code_length: usize,
    n: u32,
    pool_size: usize,
    seed: u64,
) -> Result<CodingMatrix> {
    if pool_size < 1 {
        return Err(EcocError::InvalidParameters(
            "pool_size must be at least 1".to_string(),
        ));
    }
    if !scheme.is_random() {
        return Err(EcocError::InvalidParameters(format!(
            "pool selection only applies to random schemes, not {scheme}"
        )));
    }
    let mut best: Option<(f64, CodingMatrix)> = None;
    for k in 0..pool_size {
        let candidate = generate(scheme, n_classes, code_length, n, pool_member_seed(seed, k))?;
        let rho = metrics::min_row_distance(&candidate, Distance::Absolute);
        let better = match &best {
            None => true,
            Some((best_rho, _)) => rho > *best_rho,
        };
        if better {
            best = Some((rho, candidate));
        }
    }
    Ok(best.expect("pool_size >= 1").1)
}

/// Partitions training instances for one column.
///
/// Returns the indices of instances the column keeps (entry non-zero)
/// and their group labels, preserving instance order. Signed entries map
/// to groups as -1 -> 1 and +1 -> 2; n-ary entries are their own group.
pub fn relabel_column(
    matrix: &CodingMatrix,
    column: usize,
    labels: &[u32],
) -> Result<(Vec<usize>, Vec<u32>)> {
    if column >= matrix.code_length() {
        return Err(EcocError::InvalidParameters(format!(
            "column {column} out of range for code length {}",
            matrix.code_length()
        )));
    }
    let mut kept = Vec::with_capacity(labels.len());
    let mut groups = Vec::with_capacity(labels.len());
    for (i, &label) in labels.iter().enumerate() {
        if label < 1 || label as usize > matrix.n_classes() {
            return Err(EcocError::LabelOutOfRange {
                label: label as i64,
                n_classes: matrix.n_classes() as u32,
            });
        }
        let entry = matrix.value(label as usize - 1, column);
        if let Some(group) = matrix.group_of_entry(entry) {
            kept.push(i);
            groups.push(group);
        }
    }
    Ok((kept, groups))
}

/// The 7-class, 6-column example matrix with N = 4 used across tests
/// and documentation.
pub fn seven_class_example() -> CodingMatrix {
    let entries = vec![
        1, 1, 2, 4, 1, 1, //
        2, 1, 1, 3, 2, 1, //
        3, 2, 1, 2, 3, 1, //
        4, 3, 1, 1, 4, 2, //
        4, 3, 2, 2, 4, 3, //
        4, 3, 3, 3, 3, 4, //
        3, 4, 4, 4, 2, 4, //
    ];
    CodingMatrix::new(entries, 7, 6, Scheme::Nary, 4, 0).expect("example matrix is valid")
}
