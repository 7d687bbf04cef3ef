//! Base learners for the per-column subproblems.
//!
//! Every learner trains on group labels `1..=K` (K >= 2, every group
//! present) and predicts a group for a feature row. Training is a pure
//! function of the hyperparameters, the data, and the seed.

pub mod centroid;
pub mod logistic;
pub mod tree;

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use centroid::CentroidModel;
pub use logistic::LogisticModel;
pub use tree::TreeModel;

use crate::datasets::Features;
use crate::error::{EcocError, Result};

/// Which base learner to train per column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerKind {
    /// Multinomial logistic regression trained by mini-batch gradient
    /// descent on standardized features.
    Logistic,
    /// Gini-impurity decision tree with axis-aligned splits.
    Tree,
    /// Nearest class-mean classifier.
    Centroid,
}

impl LearnerKind {
    /// Stable lowercase name used in CLI flags and stored models.
    pub fn name(&self) -> &'static str {
        match self {
            LearnerKind::Logistic => "lr",
            LearnerKind::Tree => "tree",
            LearnerKind::Centroid => "centroid",
        }
    }

    /// Parses the stable name produced by [`LearnerKind::name`].
    pub fn parse(name: &str) -> Result<LearnerKind> {
        match name {
            "lr" => Ok(LearnerKind::Logistic),
            "tree" => Ok(LearnerKind::Tree),
            "centroid" => Ok(LearnerKind::Centroid),
            other => Err(EcocError::InvalidParameters(format!(
                "unknown learner `{other}` (expected lr, tree, or centroid)"
            ))),
        }
    }
}

impl fmt::Display for LearnerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Hyperparameters for a base learner.
///
/// Gradient-descent fields apply to logistic regression, the depth and
/// leaf fields to trees; the others ignore what they do not use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearnerSpec {
    pub kind: LearnerKind,
    pub learning_rate: f64,
    pub epochs: usize,
    pub l2: f64,
    pub max_depth: usize,
    pub min_leaf: usize,
    pub seed: u64,
}

impl LearnerSpec {
    /// Logistic regression with default hyperparameters.
    pub fn logistic() -> LearnerSpec {
        LearnerSpec {
            kind: LearnerKind::Logistic,
            learning_rate: 0.1,
            epochs: 100,
            l2: 1e-4,
            max_depth: 20,
            min_leaf: 1,
            seed: 0,
        }
    }

    /// Decision tree with default hyperparameters.
    pub fn tree() -> LearnerSpec {
        LearnerSpec { kind: LearnerKind::Tree, ..LearnerSpec::logistic() }
    }

    /// Nearest centroid (no hyperparameters beyond the seed).
    pub fn centroid() -> LearnerSpec {
        LearnerSpec { kind: LearnerKind::Centroid, ..LearnerSpec::logistic() }
    }

    /// Default spec for a learner kind.
    pub fn for_kind(kind: LearnerKind) -> LearnerSpec {
        LearnerSpec { kind, ..LearnerSpec::logistic() }
    }

    pub fn with_seed(mut self, seed: u64) -> LearnerSpec {
        self.seed = seed;
        self
    }

    /// Rejects non-finite, non-positive, or zero-sized hyperparameters.
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return Err(EcocError::InvalidParameters(
                "learning_rate must be positive and finite".to_string(),
            ));
        }
        if self.epochs < 1 {
            return Err(EcocError::InvalidParameters("epochs must be at least 1".to_string()));
        }
        if !(self.l2 >= 0.0) || !self.l2.is_finite() {
            return Err(EcocError::InvalidParameters(
                "l2 must be non-negative and finite".to_string(),
            ));
        }
        if self.max_depth < 1 {
            return Err(EcocError::InvalidParameters(
                "max_depth must be at least 1".to_string(),
            ));
        }
        if self.min_leaf < 1 {
            return Err(EcocError::InvalidParameters(
                "min_leaf must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

/// A trained base learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum BaseModel {
    Logistic(LogisticModel),
    Tree(TreeModel),
    Centroid(CentroidModel),
}

impl BaseModel {
    /// Number of groups the model distinguishes.
    pub fn n_groups(&self) -> u32 {
        match self {
            BaseModel::Logistic(m) => m.n_groups,
            BaseModel::Tree(m) => m.n_groups,
            BaseModel::Centroid(m) => m.n_groups,
        }
    }

    /// Feature dimension the model was trained on.
    pub fn n_features(&self) -> usize {
        match self {
            BaseModel::Logistic(m) => m.n_features,
            BaseModel::Tree(m) => m.n_features,
            BaseModel::Centroid(m) => m.n_features,
        }
    }

    /// Predicts the group of a single feature row.
    pub fn predict_row(&self, row: &[f64]) -> Result<u32> {
        if row.len() != self.n_features() {
            return Err(EcocError::DimensionMismatch {
                expected: self.n_features(),
                got: row.len(),
            });
        }
        Ok(match self {
            BaseModel::Logistic(m) => m.predict_row(row),
            BaseModel::Tree(m) => m.predict_row(row),
            BaseModel::Centroid(m) => m.predict_row(row),
        })
    }

    /// Predicts groups for every row of a feature matrix.
    pub fn predict(&self, features: &Features) -> Result<Vec<u32>> {
        if features.n_cols() != self.n_features() {
            return Err(EcocError::DimensionMismatch {
                expected: self.n_features(),
                got: features.n_cols(),
            });
        }
        (0..features.n_rows()).map(|i| self.predict_row(features.row(i))).collect()
    }
}

/// Checks a training task and returns its group count `K`.
///
/// Labels must be non-empty, match the feature rows, cover `1..=K`
/// without gaps, and span at least two groups.
pub(crate) fn validate_task(features: &Features, labels: &[u32]) -> Result<u32> {
    if labels.is_empty() {
        return Err(EcocError::DegenerateTask("no training instances".to_string()));
    }
    if features.n_rows() != labels.len() {
        return Err(EcocError::DimensionMismatch {
            expected: labels.len(),
            got: features.n_rows(),
        });
    }
    let k = *labels.iter().max().expect("labels are non-empty");
    if labels.contains(&0) {
        return Err(EcocError::LabelOutOfRange { label: 0, n_classes: k });
    }
    if k < 2 {
        return Err(EcocError::DegenerateTask(
            "training labels span a single group".to_string(),
        ));
    }
    let mut present = alloc::vec![false; k as usize];
    for &g in labels {
        present[g as usize - 1] = true;
    }
    if let Some(missing) = present.iter().position(|&p| !p) {
        return Err(EcocError::InvalidParameters(format!(
            "group {} has no training instances; groups must be compacted to 1..=K",
            missing + 1
        )));
    }
    Ok(k)
}

/// Trains the learner described by `spec` on a group-labeled task.
pub fn fit(spec: &LearnerSpec, features: &Features, labels: &[u32]) -> Result<BaseModel> {
    spec.validate()?;
    let n_groups = validate_task(features, labels)?;
    Ok(match spec.kind {
        LearnerKind::Logistic => {
            BaseModel::Logistic(logistic::fit(spec, features, labels, n_groups))
        }
        LearnerKind::Tree => BaseModel::Tree(tree::fit(spec, features, labels, n_groups)),
        LearnerKind::Centroid => {
            BaseModel::Centroid(centroid::fit(features, labels, n_groups))
        }
    })
}
