//! Multinomial logistic regression trained by mini-batch gradient
//! descent.
//!
//! Features are standardized inside `fit`; the stored mean and scale
//! are applied again at prediction time. After every epoch the full
//! training loss is evaluated: an epoch that increased it is rolled
//! back and the learning rate halved, which keeps the recorded loss
//! sequence non-increasing.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::datasets::Features;
use crate::learners::LearnerSpec;

const BATCH_SIZE: usize = 32;
/// Stop after this many learning-rate halvings fail to make progress.
const MAX_HALVINGS: u32 = 30;

/// Trained multinomial logistic model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub n_groups: u32,
    pub n_features: usize,
    /// Group-major weight matrix, `n_groups x n_features`.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
    /// Per-feature mean subtracted before scoring.
    pub feat_mean: Vec<f64>,
    /// Per-feature scale divided out before scoring (1 for constant
    /// features).
    pub feat_scale: Vec<f64>,
    /// Training loss after initialization and after each kept epoch.
    pub train_loss: Vec<f64>,
}

impl LogisticModel {
    /// Group scores (logits) for a raw feature row.
    fn scores(&self, row: &[f64]) -> Vec<f64> {
        let d = self.n_features;
        let mut z = self.bias.clone();
        for (g, zg) in z.iter_mut().enumerate() {
            let w = &self.weights[g * d..(g + 1) * d];
            for j in 0..d {
                let x = (row[j] - self.feat_mean[j]) / self.feat_scale[j];
                *zg += w[j] * x;
            }
        }
        z
    }

    /// Predicted group (ties go to the lowest group id).
    pub fn predict_row(&self, row: &[f64]) -> u32 {
        let z = self.scores(row);
        let mut best = 0usize;
        for (g, &zg) in z.iter().enumerate().skip(1) {
            if zg > z[best] {
                best = g;
            }
        }
        best as u32 + 1
    }

    /// Class probabilities for a raw feature row.
    pub fn probabilities(&self, row: &[f64]) -> Vec<f64> {
        let mut z = self.scores(row);
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for zg in z.iter_mut() {
            *zg = libm::exp(*zg - max);
            sum += *zg;
        }
        for zg in z.iter_mut() {
            *zg /= sum;
        }
        z
    }
}

/// Mean cross-entropy loss with an L2 penalty on the weights (not the
/// biases), plus its gradients with respect to weights and biases.
///
/// `weights` is group-major `n_groups x n_features`; labels are groups
/// in `1..=n_groups`. Exposed so optimization can be checked against
/// finite differences.
pub fn loss_and_gradient(
    weights: &[f64],
    bias: &[f64],
    n_groups: usize,
    features: &Features,
    labels: &[u32],
    l2: f64,
) -> (f64, Vec<f64>, Vec<f64>) {
    let n = features.n_rows();
    let d = features.n_cols();
    let inv_n = 1.0 / n as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![0.0; n_groups * d];
    let mut grad_b = vec![0.0; n_groups];
    let mut z = vec![0.0; n_groups];

    for i in 0..n {
        let row = features.row(i);
        for g in 0..n_groups {
            let w = &weights[g * d..(g + 1) * d];
            z[g] = bias[g] + w.iter().zip(row).map(|(wj, xj)| wj * xj).sum::<f64>();
        }
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let log_sum = max + libm::log(z.iter().map(|&zg| libm::exp(zg - max)).sum());
        let y = labels[i] as usize - 1;
        loss += (log_sum - z[y]) * inv_n;
        for g in 0..n_groups {
            let p = libm::exp(z[g] - log_sum);
            let residual = (p - f64::from(g == y)) * inv_n;
            grad_b[g] += residual;
            let gw = &mut grad_w[g * d..(g + 1) * d];
            for (gwj, &xj) in gw.iter_mut().zip(row) {
                *gwj += residual * xj;
            }
        }
    }

    let mut penalty = 0.0;
    for (gw, &w) in grad_w.iter_mut().zip(weights) {
        penalty += w * w;
        *gw += l2 * w;
    }
    loss += 0.5 * l2 * penalty;
    (loss, grad_w, grad_b)
}

fn standardize(features: &Features) -> (Vec<f64>, Vec<f64>, Features) {
    let n = features.n_rows();
    let d = features.n_cols();
    let mut mean = vec![0.0; d];
    for i in 0..n {
        for (m, &x) in mean.iter_mut().zip(features.row(i)) {
            *m += x / n as f64;
        }
    }
    let mut scale = vec![0.0; d];
    for i in 0..n {
        for (j, &x) in features.row(i).iter().enumerate() {
            let dx = x - mean[j];
            scale[j] += dx * dx / n as f64;
        }
    }
    for s in scale.iter_mut() {
        *s = libm::sqrt(*s);
        if *s < 1e-12 {
            *s = 1.0;
        }
    }
    let mut data = Vec::with_capacity(n * d);
    for i in 0..n {
        for (j, &x) in features.row(i).iter().enumerate() {
            data.push((x - mean[j]) / scale[j]);
        }
    }
    let standardized = Features::new(data, n, d).expect("standardized features stay finite");
    (mean, scale, standardized)
}

pub(crate) fn fit(
    spec: &LearnerSpec,
    features: &Features,
    labels: &[u32],
    n_groups: u32,
) -> LogisticModel {
    let k = n_groups as usize;
    let n = features.n_rows();
    let d = features.n_cols();
    let (feat_mean, feat_scale, x) = standardize(features);

    let mut weights = vec![0.0; k * d];
    let mut bias = vec![0.0; k];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut lr = spec.learning_rate;
    let mut halvings = 0u32;

    let full_loss = |w: &[f64], b: &[f64]| -> f64 {
        loss_and_gradient(w, b, k, &x, labels, spec.l2).0
    };
    let mut train_loss = vec![full_loss(&weights, &bias)];

    let mut epoch = 0;
    while epoch < spec.epochs {
        let snapshot_w = weights.clone();
        let snapshot_b = bias.clone();
        order.shuffle(&mut rng);
        for batch in order.chunks(BATCH_SIZE) {
            let mut batch_rows = Vec::with_capacity(batch.len() * d);
            let mut batch_labels = Vec::with_capacity(batch.len());
            for &i in batch {
                batch_rows.extend_from_slice(x.row(i));
                batch_labels.push(labels[i]);
            }
            let bx = Features::new(batch_rows, batch.len(), d)
                .expect("batch rows come from validated features");
            let (_, grad_w, grad_b) =
                loss_and_gradient(&weights, &bias, k, &bx, &batch_labels, spec.l2);
            for (w, g) in weights.iter_mut().zip(&grad_w) {
                *w -= lr * g;
            }
            for (b, g) in bias.iter_mut().zip(&grad_b) {
                *b -= lr * g;
            }
        }
        let loss = full_loss(&weights, &bias);
        let prev = *train_loss.last().expect("initial loss is recorded");
        if loss > prev + 1e-12 {
            // The step overshot: roll the epoch back and try a smaller
            // learning rate.
            weights = snapshot_w;
            bias = snapshot_b;
            lr *= 0.5;
            halvings += 1;
            if halvings > MAX_HALVINGS {
                break;
            }
            continue;
        }
        train_loss.push(loss);
        epoch += 1;
    }

    LogisticModel {
        n_groups,
        n_features: d,
        weights,
        bias,
        feat_mean,
        feat_scale,
        train_loss,
    }
}
