//! In-memory dataset representation, synthetic data, and splitting.
//!
//! Labels are always contiguous `1..=n_classes`; loaders remap raw label
//! values and keep the original values in `label_map` for display.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{EcocError, Result};

/// Dense row-major feature matrix with all-finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Features {
    data: Vec<f64>,
    n_rows: usize,
    n_cols: usize,
}

impl Features {
    /// Validates shape and rejects NaN or infinite entries.
    pub fn new(data: Vec<f64>, n_rows: usize, n_cols: usize) -> Result<Features> {
        if n_cols < 1 {
            return Err(EcocError::InvalidParameters(
                "feature matrices need at least 1 column".to_string(),
            ));
        }
        if data.len() != n_rows * n_cols {
            return Err(EcocError::InvalidParameters(alloc::format!(
                "feature buffer of length {} does not match shape {}x{}",
                data.len(),
                n_rows,
                n_cols
            )));
        }
        for (i, &v) in data.iter().enumerate() {
            if !v.is_finite() {
                return Err(EcocError::NonFiniteFeature { row: i / n_cols, col: i % n_cols });
            }
        }
        Ok(Features { data, n_rows, n_cols })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    /// One instance as a feature slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// Flat row-major buffer.
    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// A labeled dataset with contiguous 1-based class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Features,
    /// Class label per instance, in `1..=n_classes`.
    pub labels: Vec<u32>,
    pub n_classes: u32,
    /// Original label values; `label_map[c - 1]` is the raw value that
    /// internal class `c` was remapped from.
    pub label_map: Vec<i64>,
}

impl Dataset {
    /// Builds a dataset with an identity label map, checking that every
    /// label is in range and at least one instance exists.
    pub fn new(features: Features, labels: Vec<u32>, n_classes: u32) -> Result<Dataset> {
        let label_map = (1..=n_classes as i64).collect();
        Dataset::with_label_map(features, labels, n_classes, label_map)
    }

    /// Builds a dataset remembering the raw label values.
    pub fn with_label_map(
        features: Features,
        labels: Vec<u32>,
        n_classes: u32,
        label_map: Vec<i64>,
    ) -> Result<Dataset> {
        if labels.is_empty() {
            return Err(EcocError::InvalidParameters(
                "datasets need at least 1 instance".to_string(),
            ));
        }
        if features.n_rows() != labels.len() {
            return Err(EcocError::DimensionMismatch {
                expected: labels.len(),
                got: features.n_rows(),
            });
        }
        if n_classes < 1 {
            return Err(EcocError::InvalidParameters(
                "datasets need at least 1 class".to_string(),
            ));
        }
        if label_map.len() != n_classes as usize {
            return Err(EcocError::DimensionMismatch {
                expected: n_classes as usize,
                got: label_map.len(),
            });
        }
        for &label in &labels {
            if label < 1 || label > n_classes {
                return Err(EcocError::LabelOutOfRange { label: label as i64, n_classes });
            }
        }
        Ok(Dataset { features, labels, n_classes, label_map })
    }

    pub fn n_instances(&self) -> usize {
        self.labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.features.n_cols()
    }

    /// Instance count per class, indexed by `class - 1`.
    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes as usize];
        for &label in &self.labels {
            counts[label as usize - 1] += 1;
        }
        counts
    }

    /// Dataset restricted to the given instance indices (in order).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        let n_cols = self.features.n_cols();
        let mut data = Vec::with_capacity(indices.len() * n_cols);
        let mut labels = Vec::with_capacity(indices.len());
        for &i in indices {
            data.extend_from_slice(self.features.row(i));
            labels.push(self.labels[i]);
        }
        Dataset {
            features: Features { data, n_rows: indices.len(), n_cols },
            labels,
            n_classes: self.n_classes,
            label_map: self.label_map.clone(),
        }
    }
}

/// Builds a dataset from raw (possibly sparse or negative) label values
/// by remapping the sorted distinct values to `1..=K`.
pub fn from_raw_labels(features: Features, raw_labels: &[i64]) -> Result<Dataset> {
    if raw_labels.is_empty() {
        return Err(EcocError::InvalidParameters(
            "datasets need at least 1 instance".to_string(),
        ));
    }
    let mut label_map: Vec<i64> = raw_labels.to_vec();
    label_map.sort_unstable();
    label_map.dedup();
    let labels: Vec<u32> = raw_labels
        .iter()
        .map(|raw| {
            let idx = label_map.binary_search(raw).expect("raw label is in the map");
            idx as u32 + 1
        })
        .collect();
    let n_classes = label_map.len() as u32;
    Dataset::with_label_map(features, labels, n_classes, label_map)
}

/// Retry budget for sampling distinct blob centers.
const CENTER_RETRIES: usize = 10_000;

/// Samples an isotropic Gaussian-blob classification problem.
///
/// Class centers are distinct integer lattice points; each instance is
/// its class center plus `spread` times standard normal noise. Instances
/// are ordered class-major (all of class 1, then class 2, ...). Larger
/// `spread` makes classes overlap more.
pub fn make_blobs(
    n_classes: u32,
    per_class: usize,
    dim: usize,
    spread: f64,
    seed: u64,
) -> Result<Dataset> {
    if n_classes < 2 {
        return Err(EcocError::InvalidParameters(
            "make_blobs needs at least 2 classes".to_string(),
        ));
    }
    if per_class < 1 || dim < 1 {
        return Err(EcocError::InvalidParameters(
            "make_blobs needs per_class >= 1 and dim >= 1".to_string(),
        ));
    }
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(EcocError::InvalidParameters(
            "make_blobs needs a positive finite spread".to_string(),
        ));
    }

    // Lattice side length: at least 10, grown until it can hold 4x the
    // requested number of distinct centers.
    let mut side = 10usize;
    while (side as u128).pow(dim.min(40) as u32) < 4 * n_classes as u128 {
        side += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(n_classes as usize);
    let mut attempts = 0;
    while centers.len() < n_classes as usize {
        let candidate: Vec<f64> =
            (0..dim).map(|_| rng.gen_range(0..side) as f64).collect();
        if centers.iter().any(|c| c == &candidate) {
            attempts += 1;
            if attempts > CENTER_RETRIES {
                return Err(EcocError::GenerationFailure(
                    "could not sample distinct blob centers".to_string(),
                ));
            }
            continue;
        }
        centers.push(candidate);
    }

    let n = n_classes as usize * per_class;
    let mut data = Vec::with_capacity(n * dim);
    let mut labels = Vec::with_capacity(n);
    for (c, center) in centers.iter().enumerate() {
        for _ in 0..per_class {
            for &coord in center.iter() {
                let noise: f64 = rng.sample(StandardNormal);
                data.push(coord + spread * noise);
            }
            labels.push(c as u32 + 1);
        }
    }
    Dataset::new(Features::new(data, n, dim)?, labels, n_classes)
}

/// Splits a dataset into train and test parts.
///
/// The train side gets `floor(n * fraction)` instances, clamped so both
/// sides stay non-empty. With `stratified`, the train total is allocated
/// per class by largest remainder, keeping each class within one
/// instance of its proportional share; single-instance classes always
/// go to the train side. Instance order within each part follows the
/// original dataset.
pub fn split(
    data: &Dataset,
    fraction: f64,
    stratified: bool,
    seed: u64,
) -> Result<(Dataset, Dataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(EcocError::InvalidParameters(
            "split fraction must be strictly between 0 and 1".to_string(),
        ));
    }
    let n = data.n_instances();
    if n < 2 {
        return Err(EcocError::InvalidParameters(
            "splitting needs at least 2 instances".to_string(),
        ));
    }
    let target = (libm::floor(n as f64 * fraction) as usize).clamp(1, n - 1);

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let mut in_train = vec![false; n];
    if !stratified {
        for &i in order.iter().take(target) {
            in_train[i] = true;
        }
    } else {
        // Instance indices per class, in shuffled order.
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); data.n_classes as usize];
        for &i in &order {
            by_class[data.labels[i] as usize - 1].push(i);
        }
        let mut take: Vec<usize> = Vec::with_capacity(by_class.len());
        let mut remainders: Vec<(usize, f64)> = Vec::new();
        let mut allocated = 0usize;
        for (c, members) in by_class.iter().enumerate() {
            let n_c = members.len();
            let share = n_c as f64 * fraction;
            let mut t = libm::floor(share) as usize;
            if n_c == 1 {
                t = 1;
            }
            allocated += t;
            take.push(t);
            if n_c > 1 {
                remainders.push((c, share - libm::floor(share)));
            }
        }
        // Hand out any remaining train quota to the classes whose share
        // was rounded down the hardest (ties go to the lower class id).
        if allocated < target {
            remainders.sort_by(|a, b| {
                b.1.partial_cmp(&a.1).expect("remainders are finite").then(a.0.cmp(&b.0))
            });
            let mut left = target - allocated;
            for &(c, _) in remainders.iter().cycle().take(remainders.len() * 2) {
                if left == 0 {
                    break;
                }
                if take[c] < by_class[c].len() {
                    take[c] += 1;
                    left -= 1;
                }
            }
        }
        for (c, members) in by_class.iter().enumerate() {
            for &i in members.iter().take(take[c]) {
                in_train[i] = true;
            }
        }
    }

    let train_idx: Vec<usize> = (0..n).filter(|&i| in_train[i]).collect();
    let test_idx: Vec<usize> = (0..n).filter(|&i| !in_train[i]).collect();
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(EcocError::InvalidParameters(
            "split left one side empty; use more data or a different fraction".to_string(),
        ));
    }
    Ok((data.subset(&train_idx), data.subset(&test_idx)))
}

/// Splits a dataset into `k` cross-validation folds.
///
/// Returns `(train, test)` pairs where each instance appears in exactly
/// one test fold and fold sizes differ by at most one.
pub fn kfold(data: &Dataset, k: usize, seed: u64) -> Result<Vec<(Dataset, Dataset)>> {
    let n = data.n_instances();
    if k < 2 || k > n {
        return Err(EcocError::InvalidParameters(alloc::format!(
            "k-fold needs 2 <= k <= n_instances, got k={k}, n={n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);

    let base = n / k;
    let extra = n % k;
    let mut folds: Vec<Vec<usize>> = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let size = base + usize::from(f < extra);
        folds.push(order[start..start + size].to_vec());
        start += size;
    }

    let mut out = Vec::with_capacity(k);
    for f in 0..k {
        let mut test: Vec<usize> = folds[f].clone();
        test.sort_unstable();
        let mut train: Vec<usize> =
            (0..k).filter(|&g| g != f).flat_map(|g| folds[g].iter().copied()).collect();
        train.sort_unstable();
        out.push((data.subset(&train), data.subset(&test)));
    }
    Ok(out)
}
