//! Nearest class-mean classifier.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::datasets::Features;

/// Trained nearest-centroid model: one mean vector per group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidModel {
    pub n_groups: u32,
    pub n_features: usize,
    /// Group-major centroid matrix, `n_groups x n_features`.
    pub centroids: Vec<f64>,
}

impl CentroidModel {
    fn centroid(&self, group_index: usize) -> &[f64] {
        &self.centroids[group_index * self.n_features..(group_index + 1) * self.n_features]
    }

    /// Predicted group by squared Euclidean distance (ties go to the
    /// lowest group id).
    pub fn predict_row(&self, row: &[f64]) -> u32 {
        let mut best = 0usize;
        let mut best_d2 = f64::INFINITY;
        for g in 0..self.n_groups as usize {
            let d2: f64 = self
                .centroid(g)
                .iter()
                .zip(row)
                .map(|(c, x)| (c - x) * (c - x))
                .sum();
            if d2 < best_d2 {
                best = g;
                best_d2 = d2;
            }
        }
        best as u32 + 1
    }
}

pub(crate) fn fit(features: &Features, labels: &[u32], n_groups: u32) -> CentroidModel {
    let k = n_groups as usize;
    let d = features.n_cols();
    let mut centroids = vec![0.0; k * d];
    let mut counts = vec![0usize; k];
    for (i, &g) in labels.iter().enumerate() {
        let g = g as usize - 1;
        counts[g] += 1;
        for (c, &x) in centroids[g * d..(g + 1) * d].iter_mut().zip(features.row(i)) {
            *c += x;
        }
    }
    for g in 0..k {
        // Every group is validated to be present, so counts are positive.
        for c in centroids[g * d..(g + 1) * d].iter_mut() {
            *c /= counts[g] as f64;
        }
    }
    CentroidModel { n_groups, n_features: d, centroids }
}
