//! Gini-impurity decision tree with axis-aligned splits.
//!
//! Split quality is compared in exact integer arithmetic, so training
//! is bit-for-bit reproducible: the score of a split is
//! `sum(count^2)/n_left + sum(count^2)/n_right`, maximized over
//! candidates (equivalent to minimizing weighted Gini impurity).
//! Zero-gain splits are allowed, which lets the tree work through
//! XOR-like structure that no single split improves. Candidate ties go
//! to the lowest feature index, then the lowest threshold.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::datasets::Features;
use crate::learners::LearnerSpec;

/// One node of a trained tree, stored in a flat arena.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    /// Terminal node predicting a group.
    Leaf { group: u32 },
    /// Internal test: rows with `row[feature] < threshold` go left.
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

/// Trained decision tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub n_groups: u32,
    pub n_features: usize,
    /// Node arena; index 0 is the root.
    pub nodes: Vec<TreeNode>,
}

impl TreeModel {
    /// Predicted group (deterministic walk from the root).
    pub fn predict_row(&self, row: &[f64]) -> u32 {
        let mut at = 0usize;
        loop {
            match self.nodes[at] {
                TreeNode::Leaf { group } => return group,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if row[feature] < threshold { left } else { right };
                }
            }
        }
    }

    /// Depth of the deepest leaf (root alone has depth 0).
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[TreeNode], at: usize) -> usize {
            match nodes[at] {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => {
                    1 + walk(nodes, left).max(walk(nodes, right))
                }
            }
        }
        walk(&self.nodes, 0)
    }
}

/// A candidate split's quality as an exact fraction.
#[derive(Clone, Copy, PartialEq, Eq)]
struct Score {
    num: u128,
    den: u128,
}

impl Score {
    fn new(sum_sq_left: u128, n_left: u128, sum_sq_right: u128, n_right: u128) -> Score {
        Score {
            num: sum_sq_left * n_right + sum_sq_right * n_left,
            den: n_left * n_right,
        }
    }

    fn beats(&self, other: &Score) -> bool {
        self.num * other.den > other.num * self.den
    }
}

fn majority_group(counts: &[usize]) -> u32 {
    let mut best = 0usize;
    for (g, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = g;
        }
    }
    best as u32 + 1
}

struct Builder<'a> {
    features: &'a Features,
    labels: &'a [u32],
    n_groups: usize,
    max_depth: usize,
    min_leaf: usize,
    nodes: Vec<TreeNode>,
}

struct BestSplit {
    score: Score,
    feature: usize,
    threshold: f64,
}

impl<'a> Builder<'a> {
    fn group_counts(&self, indices: &[usize]) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_groups];
        for &i in indices {
            counts[self.labels[i] as usize - 1] += 1;
        }
        counts
    }

    /// Best valid split of a node, or `None` when no threshold separates
    /// the instances under the leaf-size constraint.
    fn best_split(&self, indices: &[usize]) -> Option<BestSplit> {
        let n = indices.len();
        let mut best: Option<BestSplit> = None;
        let mut column: Vec<(f64, u32)> = Vec::with_capacity(n);
        for feature in 0..self.features.n_cols() {
            column.clear();
            for &i in indices {
                column.push((self.features.row(i)[feature], self.labels[i]));
            }
            column.sort_by(|a, b| {
                a.0.partial_cmp(&b.0).expect("features are finite").then(a.1.cmp(&b.1))
            });

            let mut left = vec![0u128; self.n_groups];
            let mut right = vec![0u128; self.n_groups];
            let mut sum_sq_left = 0u128;
            let mut sum_sq_right = 0u128;
            for &(_, g) in column.iter() {
                right[g as usize - 1] += 1;
            }
            for &c in right.iter() {
                sum_sq_right += c * c;
            }

            for i in 0..n - 1 {
                let g = column[i].1 as usize - 1;
                sum_sq_left += 2 * left[g] + 1;
                left[g] += 1;
                sum_sq_right -= 2 * right[g] - 1;
                right[g] -= 1;

                let (a, b) = (column[i].0, column[i + 1].0);
                if a >= b {
                    continue;
                }
                let n_left = i + 1;
                let n_right = n - n_left;
                if n_left < self.min_leaf || n_right < self.min_leaf {
                    continue;
                }
                let threshold = 0.5 * (a + b);
                // Guard against the midpoint collapsing onto a bound
                // when the two values are adjacent floats.
                if !(threshold > a && threshold <= b) {
                    continue;
                }
                let score =
                    Score::new(sum_sq_left, n_left as u128, sum_sq_right, n_right as u128);
                let better = match &best {
                    None => true,
                    Some(b) => score.beats(&b.score),
                };
                if better {
                    best = Some(BestSplit { score, feature, threshold });
                }
            }
        }
        best
    }

    fn build(&mut self, indices: Vec<usize>, depth: usize, slot: usize) -> Vec<(Vec<usize>, usize, usize)> {
        let counts = self.group_counts(&indices);
        let distinct = counts.iter().filter(|&&c| c > 0).count();
        if distinct <= 1 || depth >= self.max_depth || indices.len() < 2 * self.min_leaf {
            self.nodes[slot] = TreeNode::Leaf { group: majority_group(&counts) };
            return Vec::new();
        }
        let Some(split) = self.best_split(&indices) else {
            self.nodes[slot] = TreeNode::Leaf { group: majority_group(&counts) };
            return Vec::new();
        };
        let (mut left_idx, mut right_idx) = (Vec::new(), Vec::new());
        for &i in &indices {
            if self.features.row(i)[split.feature] < split.threshold {
                left_idx.push(i);
            } else {
                right_idx.push(i);
            }
        }
        let left = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { group: 1 });
        let right = self.nodes.len();
        self.nodes.push(TreeNode::Leaf { group: 1 });
        self.nodes[slot] = TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            left,
            right,
        };
        vec![(left_idx, depth + 1, left), (right_idx, depth + 1, right)]
    }
}

pub(crate) fn fit(
    spec: &LearnerSpec,
    features: &Features,
    labels: &[u32],
    n_groups: u32,
) -> TreeModel {
    let mut builder = Builder {
        features,
        labels,
        n_groups: n_groups as usize,
        max_depth: spec.max_depth,
        min_leaf: spec.min_leaf,
        nodes: vec![TreeNode::Leaf { group: 1 }],
    };
    // Explicit work stack: tree depth is data-dependent and must not be
    // limited by call-stack size.
    let mut work = vec![((0..features.n_rows()).collect::<Vec<usize>>(), 0usize, 0usize)];
    while let Some((indices, depth, slot)) = work.pop() {
        work.extend(builder.build(indices, depth, slot));
    }
    TreeModel { n_groups, n_features: features.n_cols(), nodes: builder.nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::make_blobs;
    use crate::learners::{self, BaseModel};

    fn features(rows: &[&[f64]]) -> Features {
        let data: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Features::new(data, rows.len(), rows[0].len()).unwrap()
    }

    fn tree_spec() -> LearnerSpec {
        LearnerSpec::tree()
    }

    #[test]
    fn learns_xor_through_a_zero_gain_root_split() {
        let x = features(&[&[0.0, 0.0], &[1.0, 1.0], &[0.0, 1.0], &[1.0, 0.0]]);
        let labels = vec![1, 1, 2, 2];
        let model = fit(&tree_spec(), &x, &labels, 2);
        for (i, &label) in labels.iter().enumerate() {
            assert_eq!(model.predict_row(x.row(i)), label);
        }
        assert_eq!(model.depth(), 2);
    }

    #[test]
    fn respects_max_depth() {
        let data = make_blobs(4, 30, 3, 1.5, 8).unwrap();
        for max_depth in [1, 2, 3] {
            let spec = LearnerSpec { max_depth, ..tree_spec() };
            let model = fit(&spec, &data.features, &data.labels, 4);
            assert!(model.depth() <= max_depth);
        }
    }

    #[test]
    fn respects_min_leaf_on_every_split() {
        let data = make_blobs(3, 40, 2, 1.2, 4).unwrap();
        let min_leaf = 7;
        let spec = LearnerSpec { min_leaf, ..tree_spec() };
        let model = fit(&spec, &data.features, &data.labels, 3);

        // Re-route every training instance through the tree and count
        // arrivals per node.
        let mut through = vec![0usize; model.nodes.len()];
        for i in 0..data.n_instances() {
            let mut at = 0usize;
            loop {
                through[at] += 1;
                match model.nodes[at] {
                    TreeNode::Leaf { .. } => break,
                    TreeNode::Split { feature, threshold, left, right } => {
                        at = if data.features.row(i)[feature] < threshold { left } else { right };
                    }
                }
            }
        }
        for (node, &count) in model.nodes.iter().zip(&through) {
            if matches!(node, TreeNode::Leaf { .. }) {
                assert!(count >= min_leaf, "leaf holds {count} < {min_leaf} instances");
            }
        }
    }

    #[test]
    fn pure_nodes_become_leaves() {
        let x = features(&[&[0.0], &[1.0], &[2.0], &[3.0]]);
        let model = fit(&tree_spec(), &x, &[1, 1, 2, 2], 2);
        // One boundary separates the groups perfectly: a single split.
        assert_eq!(model.nodes.len(), 3);
        assert_eq!(model.predict_row(&[0.5]), 1);
        assert_eq!(model.predict_row(&[2.5]), 2);
    }

    #[test]
    fn split_threshold_is_the_midpoint_of_neighbors() {
        let x = features(&[&[0.0], &[4.0]]);
        let model = fit(&tree_spec(), &x, &[1, 2], 2);
        match model.nodes[0] {
            TreeNode::Split { threshold, feature, .. } => {
                assert_eq!(feature, 0);
                assert_eq!(threshold, 2.0);
            }
            _ => panic!("expected a split at the root"),
        }
    }

    #[test]
    fn ties_prefer_the_lowest_feature() {
        // Feature 1 duplicates feature 0, so their best splits score
        // identically; the tree must pick feature 0.
        let x = features(&[&[0.0, 0.0], &[1.0, 1.0], &[2.0, 2.0], &[3.0, 3.0]]);
        let model = fit(&tree_spec(), &x, &[1, 1, 2, 2], 2);
        match model.nodes[0] {
            TreeNode::Split { feature, .. } => assert_eq!(feature, 0),
            _ => panic!("expected a split at the root"),
        }
    }

    #[test]
    fn identical_rows_with_mixed_labels_fall_back_to_majority() {
        let x = features(&[&[1.0, 2.0], &[1.0, 2.0], &[1.0, 2.0]]);
        let model = fit(&tree_spec(), &x, &[2, 2, 1], 2);
        assert_eq!(model.nodes.len(), 1);
        assert_eq!(model.predict_row(&[1.0, 2.0]), 2);
    }

    #[test]
    fn majority_ties_go_to_the_lowest_group() {
        let x = features(&[&[1.0], &[1.0]]);
        let model = fit(&tree_spec(), &x, &[2, 1], 2);
        assert_eq!(model.predict_row(&[1.0]), 1);
    }

    #[test]
    fn stump_matches_brute_force_search() {
        // Depth-1 oracle: try every feature and boundary directly.
        let data = make_blobs(3, 15, 3, 1.0, 31).unwrap();
        let spec = LearnerSpec { max_depth: 1, ..tree_spec() };
        let model = match learners::fit(&spec, &data.features, &data.labels).unwrap() {
            BaseModel::Tree(m) => m,
            _ => unreachable!(),
        };

        let mut best_impurity = f64::INFINITY;
        let mut best_feature = usize::MAX;
        let mut best_threshold = f64::NAN;
        let n = data.n_instances();
        for feature in 0..3 {
            let mut values: Vec<f64> =
                (0..n).map(|i| data.features.row(i)[feature]).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            values.dedup();
            for pair in values.windows(2) {
                let threshold = 0.5 * (pair[0] + pair[1]);
                let mut left = vec![0.0; 3];
                let mut right = vec![0.0; 3];
                for i in 0..n {
                    let side = if data.features.row(i)[feature] < threshold {
                        &mut left
                    } else {
                        &mut right
                    };
                    side[data.labels[i] as usize - 1] += 1.0;
                }
                let gini = |counts: &[f64]| -> f64 {
                    let total: f64 = counts.iter().sum();
                    let sq: f64 = counts.iter().map(|c| c * c).sum();
                    total - sq / total
                };
                // total - sum(c^2)/n at both children, summed, is n minus
                // the score the builder maximizes.
                let impurity = gini(&left) + gini(&right);
                if impurity < best_impurity - 1e-9 {
                    best_impurity = impurity;
                    best_feature = feature;
                    best_threshold = threshold;
                }
            }
        }

        match model.nodes[0] {
            TreeNode::Split { feature, threshold, .. } => {
                assert_eq!(feature, best_feature);
                assert!((threshold - best_threshold).abs() < 1e-12);
            }
            _ => panic!("expected a split at the root"),
        }
    }
}
