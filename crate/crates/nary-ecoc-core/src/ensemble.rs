//! Ensemble training and decoding over a coding matrix.
//!
//! Each matrix column defines a subproblem: instances are relabeled
//! into the column's groups and one base learner is trained per column.
//! Prediction runs every column learner to produce a code word, then
//! decodes it to the class whose matrix row is nearest.
//!
//! A column is *degenerate* when its training instances cover fewer
//! than two groups; it gets no model and is skipped by decoding, and
//! the row separation `rho` is recomputed over the surviving columns.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::coding::{relabel_column, CodingMatrix};
use crate::datasets::{Dataset, Features};
use crate::derive_seed;
use crate::error::{EcocError, Result};
use crate::learners::{self, BaseModel, LearnerSpec};
use crate::metrics::{position_distance, Distance};

/// One trained column of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnModel {
    /// The trained learner, or `None` for a degenerate column.
    pub model: Option<BaseModel>,
    /// Matrix entry per learner group: the group `g` predicted by the
    /// model stands for matrix value `values[g - 1]`.
    pub values: Vec<i32>,
}

/// A trained error-correcting ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EcocModel {
    pub matrix: CodingMatrix,
    /// One entry per matrix column, in column order.
    pub columns: Vec<ColumnModel>,
    /// Distance used by [`decode`].
    pub decoding: Distance,
    pub learner_spec: LearnerSpec,
}

impl EcocModel {
    /// Indices of columns that have a trained model.
    pub fn active_columns(&self) -> Vec<usize> {
        (0..self.columns.len()).filter(|&s| self.columns[s].model.is_some()).collect()
    }

    /// Indices of columns that could not be trained.
    pub fn degenerate_columns(&self) -> Vec<usize> {
        (0..self.columns.len()).filter(|&s| self.columns[s].model.is_none()).collect()
    }

    /// Feature dimension the ensemble was trained on.
    pub fn n_features(&self) -> usize {
        self.columns
            .iter()
            .find_map(|c| c.model.as_ref())
            .map(|m| m.n_features())
            .expect("assembled models have at least one active column")
    }

    /// Minimum pairwise row distance restricted to active columns.
    ///
    /// This is the separation that decoding can actually exploit; it
    /// shrinks when degenerate columns are skipped and can reach 0 if
    /// two rows become indistinguishable.
    pub fn rho(&self) -> f64 {
        let active = self.active_columns();
        let m = &self.matrix;
        let mut best = f64::INFINITY;
        for a in 0..m.n_classes() {
            for b in (a + 1)..m.n_classes() {
                let d: f64 = active
                    .iter()
                    .map(|&s| position_distance(self.decoding, m.value(a, s), m.value(b, s)))
                    .sum();
                if d < best {
                    best = d;
                }
            }
        }
        best
    }
}

/// Trains the base learner for a single matrix column.
///
/// Returns a degenerate [`ColumnModel`] when the column keeps no
/// instances or its kept instances span fewer than two groups.
pub fn train_column(
    matrix: &CodingMatrix,
    spec: &LearnerSpec,
    data: &Dataset,
    column: usize,
) -> Result<ColumnModel> {
    let (kept, groups) = relabel_column(matrix, column, &data.labels)?;

    let mut distinct: Vec<u32> = groups.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let values: Vec<i32> = distinct.iter().map(|&g| matrix.entry_of_group(g)).collect();
    if kept.is_empty() || distinct.len() < 2 {
        return Ok(ColumnModel { model: None, values });
    }

    let n_cols = data.n_features();
    let mut rows = Vec::with_capacity(kept.len() * n_cols);
    for &i in &kept {
        rows.extend_from_slice(data.features.row(i));
    }
    let features = Features::new(rows, kept.len(), n_cols)?;
    // Compact group ids to 1..=K so absent groups do not leave gaps.
    let labels: Vec<u32> = groups
        .iter()
        .map(|g| distinct.binary_search(g).expect("group is in the distinct set") as u32 + 1)
        .collect();

    let column_spec = spec.with_seed(derive_seed(spec.seed, column as u64));
    let model = learners::fit(&column_spec, &features, &labels)?;
    Ok(ColumnModel { model: Some(model), values })
}

/// Combines per-column models into an ensemble, validating that at
/// least one column is active and that active columns agree on shape.
pub fn assemble(
    matrix: CodingMatrix,
    learner_spec: LearnerSpec,
    decoding: Distance,
    columns: Vec<ColumnModel>,
) -> Result<EcocModel> {
    if columns.len() != matrix.code_length() {
        return Err(EcocError::DimensionMismatch {
            expected: matrix.code_length(),
            got: columns.len(),
        });
    }
    let mut n_features: Option<usize> = None;
    for (s, column) in columns.iter().enumerate() {
        let Some(model) = &column.model else { continue };
        if model.n_groups() as usize != column.values.len() {
            return Err(EcocError::InvariantViolation(alloc::format!(
                "column {s} predicts {} groups but maps {} values",
                model.n_groups(),
                column.values.len()
            )));
        }
        match n_features {
            None => n_features = Some(model.n_features()),
            Some(d) if d != model.n_features() => {
                return Err(EcocError::DimensionMismatch {
                    expected: d,
                    got: model.n_features(),
                });
            }
            _ => {}
        }
    }
    if n_features.is_none() {
        return Err(EcocError::UntrainableMatrix);
    }
    Ok(EcocModel { matrix, columns, decoding, learner_spec })
}

/// Trains one base learner per matrix column.
///
/// Requires the dataset's class count to match the matrix and every
/// class to have at least one training instance.
pub fn train(
    matrix: &CodingMatrix,
    spec: &LearnerSpec,
    decoding: Distance,
    data: &Dataset,
) -> Result<EcocModel> {
    spec.validate()?;
    if data.n_classes as usize != matrix.n_classes() {
        return Err(EcocError::DimensionMismatch {
            expected: matrix.n_classes(),
            got: data.n_classes as usize,
        });
    }
    if let Some(missing) = data.class_counts().iter().position(|&c| c == 0) {
        return Err(EcocError::InvalidParameters(alloc::format!(
            "class {} has no training instances",
            missing + 1
        )));
    }
    let columns: Result<Vec<ColumnModel>> = (0..matrix.code_length())
        .map(|s| train_column(matrix, spec, data, s))
        .collect();
    assemble(matrix.clone(), *spec, decoding, columns?)
}

/// Predicts the code word of every instance.
///
/// Degenerate columns contribute the sentinel 0 (never a valid n-ary
/// value) and are ignored by decoding.
pub fn predict_codes(model: &EcocModel, features: &Features) -> Result<Vec<Vec<i32>>> {
    if features.n_cols() != model.n_features() {
        return Err(EcocError::DimensionMismatch {
            expected: model.n_features(),
            got: features.n_cols(),
        });
    }
    // Predict column-by-column so each learner's work stays cache-local.
    let mut codes = vec![vec![0i32; model.columns.len()]; features.n_rows()];
    for (s, column) in model.columns.iter().enumerate() {
        let Some(base) = &column.model else { continue };
        let groups = base.predict(features)?;
        for (code, g) in codes.iter_mut().zip(groups) {
            code[s] = column.values[g as usize - 1];
        }
    }
    Ok(codes)
}

/// Decodes a code word against a matrix: the class whose row is
/// nearest under `distance`, ties resolved to the lowest class id.
///
/// `active` restricts the comparison to a subset of columns; `None`
/// uses all of them.
pub fn decode_rows(
    matrix: &CodingMatrix,
    code: &[i32],
    distance: Distance,
    active: Option<&[usize]>,
) -> Result<u32> {
    if code.len() != matrix.code_length() {
        return Err(EcocError::LengthMismatch {
            left: matrix.code_length(),
            right: code.len(),
        });
    }
    if let Some(active) = active {
        if let Some(&bad) = active.iter().find(|&&s| s >= matrix.code_length()) {
            return Err(EcocError::InvalidParameters(alloc::format!(
                "active column {bad} out of range for code length {}",
                matrix.code_length()
            )));
        }
    }
    let row_dist = |r: usize| -> f64 {
        match active {
            Some(active) => active
                .iter()
                .map(|&s| position_distance(distance, matrix.value(r, s), code[s]))
                .sum(),
            None => (0..matrix.code_length())
                .map(|s| position_distance(distance, matrix.value(r, s), code[s]))
                .sum(),
        }
    };
    let mut best = 0usize;
    let mut best_d = row_dist(0);
    for r in 1..matrix.n_classes() {
        let d = row_dist(r);
        if d < best_d {
            best = r;
            best_d = d;
        }
    }
    Ok(best as u32 + 1)
}

/// Decodes a code word with the model's distance, skipping degenerate
/// columns.
pub fn decode(model: &EcocModel, code: &[i32]) -> Result<u32> {
    decode_rows(&model.matrix, code, model.decoding, Some(&model.active_columns()))
}

/// Predicts classes for every row of a feature matrix.
pub fn predict(model: &EcocModel, features: &Features) -> Result<Vec<u32>> {
    let codes = predict_codes(model, features)?;
    let active = model.active_columns();
    codes
        .iter()
        .map(|code| decode_rows(&model.matrix, code, model.decoding, Some(&active)))
        .collect()
}

/// Test-set performance of an ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    /// Fraction of correctly classified instances in `[0, 1]`.
    pub accuracy: f64,
    pub n_instances: usize,
    pub n_classes: usize,
    /// Row-normalized confusion matrix in percent: entry `[t][p]` is
    /// the share of true-class `t + 1` instances predicted as `p + 1`.
    /// Rows of classes absent from the data are all zero.
    pub confusion_pct: Vec<Vec<f64>>,
    /// Per-class precision in percent; `None` when the class was never
    /// predicted.
    pub precision_pct: Vec<Option<f64>>,
    /// Per-class recall in percent; `None` when the class has no
    /// instances in the data.
    pub recall_pct: Vec<Option<f64>>,
}

/// Evaluates an ensemble on labeled data.
pub fn evaluate(model: &EcocModel, data: &Dataset) -> Result<EvalReport> {
    let n_classes = model.matrix.n_classes();
    for &label in &data.labels {
        if label < 1 || label as usize > n_classes {
            return Err(EcocError::LabelOutOfRange {
                label: label as i64,
                n_classes: n_classes as u32,
            });
        }
    }
    let predictions = predict(model, &data.features)?;
    let mut counts = vec![vec![0usize; n_classes]; n_classes];
    for (&truth, &pred) in data.labels.iter().zip(&predictions) {
        counts[truth as usize - 1][pred as usize - 1] += 1;
    }
    let n = data.n_instances();
    let correct: usize = (0..n_classes).map(|c| counts[c][c]).sum();

    let confusion_pct: Vec<Vec<f64>> = counts
        .iter()
        .map(|row| {
            let total: usize = row.iter().sum();
            row.iter()
                .map(|&c| if total == 0 { 0.0 } else { 100.0 * c as f64 / total as f64 })
                .collect()
        })
        .collect();
    let recall_pct: Vec<Option<f64>> = (0..n_classes)
        .map(|c| {
            let total: usize = counts[c].iter().sum();
            (total > 0).then(|| 100.0 * counts[c][c] as f64 / total as f64)
        })
        .collect();
    let precision_pct: Vec<Option<f64>> = (0..n_classes)
        .map(|c| {
            let total: usize = (0..n_classes).map(|t| counts[t][c]).sum();
            (total > 0).then(|| 100.0 * counts[c][c] as f64 / total as f64)
        })
        .collect();

    Ok(EvalReport {
        accuracy: correct as f64 / n as f64,
        n_instances: n,
        n_classes,
        confusion_pct,
        precision_pct,
        recall_pct,
    })
}

/// Counts misclassified instances whose code word lies closer than
/// `rho / 2` to their true class row — which the decoding geometry
/// rules out, so any non-zero count exposes an implementation fault.
pub fn margin_violations(model: &EcocModel, data: &Dataset) -> Result<usize> {
    let rho = model.rho();
    if !(rho > 0.0) {
        return Err(EcocError::UndefinedBound);
    }
    let n_classes = model.matrix.n_classes();
    for &label in &data.labels {
        if label < 1 || label as usize > n_classes {
            return Err(EcocError::LabelOutOfRange {
                label: label as i64,
                n_classes: n_classes as u32,
            });
        }
    }
    let codes = predict_codes(model, &data.features)?;
    let active = model.active_columns();
    let mut violations = 0usize;
    for (i, code) in codes.iter().enumerate() {
        let truth = data.labels[i] as usize - 1;
        let pred = decode_rows(&model.matrix, code, model.decoding, Some(&active))?;
        if pred as usize - 1 == truth {
            continue;
        }
        let d: f64 = active
            .iter()
            .map(|&s| position_distance(model.decoding, model.matrix.value(truth, s), code[s]))
            .sum();
        if d < rho / 2.0 {
            violations += 1;
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{self, seven_class_example, Scheme};
    use crate::datasets::make_blobs;
    use crate::metrics::row_distance;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn walkthrough_code_decodes_to_class_four() {
        let m = seven_class_example();
        let code = [4, 3, 1, 2, 4, 2];
        assert_eq!(decode_rows(&m, &code, Distance::Hamming, None).unwrap(), 4);
        // The winning row differs from the code in exactly one position.
        assert_eq!(row_distance(Distance::Hamming, m.row(3), &code).unwrap(), 1.0);
    }

    #[test]
    fn decode_matches_argmin_oracle_with_and_without_masks() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for round in 0..400 {
            let scheme = match round % 3 {
                0 => Scheme::Nary,
                1 => Scheme::SparseRandom,
                _ => Scheme::DenseRandom,
            };
            let n_classes = rng.gen_range(2..9usize);
            let code_length = rng.gen_range(1..10usize);
            let n =
                if scheme == Scheme::Nary { rng.gen_range(2..=n_classes as u32) } else { 2 };
            let Ok(m) = coding::generate(scheme, n_classes, code_length, n, rng.gen()) else {
                continue;
            };
            // Codes drawn from the full alphabet plus the 0 sentinel.
            let code: Vec<i32> = (0..code_length)
                .map(|_| if scheme == Scheme::Nary {
                    rng.gen_range(0..=n as i32)
                } else {
                    rng.gen_range(-1..=1i32)
                })
                .collect();
            let active: Option<Vec<usize>> = if rng.gen::<bool>() {
                Some((0..code_length).filter(|_| rng.gen::<bool>()).collect())
            } else {
                None
            };
            for distance in [Distance::Hamming, Distance::Absolute] {
                let got =
                    decode_rows(&m, &code, distance, active.as_deref()).unwrap();
                // Oracle: explicit scan keeping the first minimum.
                let columns: Vec<usize> = match &active {
                    Some(a) => a.clone(),
                    None => (0..code_length).collect(),
                };
                let mut best = 1u32;
                let mut best_d = f64::INFINITY;
                for r in 0..n_classes {
                    let d: f64 = columns
                        .iter()
                        .map(|&s| position_distance(distance, m.value(r, s), code[s]))
                        .sum();
                    if d < best_d {
                        best = r as u32 + 1;
                        best_d = d;
                    }
                }
                assert_eq!(got, best, "round {round} distance {distance}");
            }
        }
    }

    #[test]
    fn decode_breaks_ties_toward_the_lowest_class() {
        let m = coding::CodingMatrix::new(vec![1, 1, 2, 2], 2, 2, Scheme::Nary, 2, 0).unwrap();
        // [1, 2] is one position from each row under Hamming.
        assert_eq!(decode_rows(&m, &[1, 2], Distance::Hamming, None).unwrap(), 1);
        assert_eq!(decode_rows(&m, &[2, 1], Distance::Hamming, None).unwrap(), 1);
    }

    #[test]
    fn decode_validates_code_length_and_mask() {
        let m = seven_class_example();
        assert!(matches!(
            decode_rows(&m, &[1, 2], Distance::Hamming, None),
            Err(EcocError::LengthMismatch { .. })
        ));
        assert!(decode_rows(&m, &[1; 6], Distance::Hamming, Some(&[6])).is_err());
    }

    fn trained_blob_model(decoding: Distance) -> (EcocModel, Dataset) {
        let data = make_blobs(5, 25, 3, 0.15, 40).unwrap();
        let matrix = coding::generate(Scheme::Nary, 5, 12, 3, 7).unwrap();
        let model = train(&matrix, &LearnerSpec::tree().with_seed(3), decoding, &data).unwrap();
        (model, data)
    }

    #[test]
    fn training_on_separated_blobs_reaches_full_accuracy() {
        let (model, data) = trained_blob_model(Distance::Hamming);
        assert!(model.degenerate_columns().is_empty());
        let report = evaluate(&model, &data).unwrap();
        assert_eq!(report.accuracy, 1.0);
        assert_eq!(report.n_instances, 125);
        for c in 0..5 {
            assert_eq!(report.confusion_pct[c][c], 100.0);
            assert_eq!(report.precision_pct[c], Some(100.0));
            assert_eq!(report.recall_pct[c], Some(100.0));
        }
    }

    #[test]
    fn predicted_codes_use_only_column_values() {
        let (model, data) = trained_blob_model(Distance::Absolute);
        let codes = predict_codes(&model, &data.features).unwrap();
        for code in &codes {
            for (s, &v) in code.iter().enumerate() {
                assert!(
                    model.columns[s].values.contains(&v),
                    "column {s} produced value {v} outside its group map"
                );
            }
        }
    }

    #[test]
    fn training_is_deterministic() {
        let data = make_blobs(4, 15, 2, 0.5, 11).unwrap();
        let matrix = coding::generate(Scheme::Nary, 4, 8, 3, 2).unwrap();
        let spec = LearnerSpec::logistic().with_seed(5);
        let a = train(&matrix, &spec, Distance::Hamming, &data).unwrap();
        let b = train(&matrix, &spec, Distance::Hamming, &data).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn column_seeds_differ_between_columns() {
        let data = make_blobs(4, 20, 2, 1.0, 12).unwrap();
        let matrix = coding::CodingMatrix::new(
            // Two identical columns: same subproblem, different streams.
            vec![1, 1, 2, 2, 3, 3, 4, 4],
            4,
            2,
            Scheme::Nary,
            4,
            0,
        )
        .unwrap();
        let model =
            train(&matrix, &LearnerSpec::logistic().with_seed(9), Distance::Hamming, &data)
                .unwrap();
        let spec_a = match (&model.columns[0].model, &model.columns[1].model) {
            (Some(BaseModel::Logistic(a)), Some(BaseModel::Logistic(b))) => {
                // Same task, but mini-batch order differs per column.
                (a.clone(), b.clone())
            }
            _ => panic!("expected logistic columns"),
        };
        assert_ne!(spec_a.0.weights, spec_a.1.weights);
    }

    #[test]
    fn train_requires_matching_classes_and_full_coverage() {
        let data = make_blobs(4, 10, 2, 0.5, 1).unwrap();
        let wrong = coding::generate(Scheme::Nary, 5, 8, 3, 0).unwrap();
        assert!(matches!(
            train(&wrong, &LearnerSpec::centroid(), Distance::Hamming, &data),
            Err(EcocError::DimensionMismatch { .. })
        ));

        // Drop every instance of class 2.
        let keep: Vec<usize> =
            (0..data.n_instances()).filter(|&i| data.labels[i] != 2).collect();
        let partial = data.subset(&keep);
        let matrix = coding::generate(Scheme::Nary, 4, 8, 3, 0).unwrap();
        assert!(matches!(
            train(&matrix, &LearnerSpec::centroid(), Distance::Hamming, &partial),
            Err(EcocError::InvalidParameters(_))
        ));
    }

    #[test]
    fn degenerate_columns_are_skipped_and_shrink_rho() {
        let data = make_blobs(3, 12, 2, 0.1, 19).unwrap();
        let matrix = coding::CodingMatrix::new(
            vec![
                1, 1, //
                2, 1, //
                3, 2, //
            ],
            3,
            2,
            Scheme::Nary,
            3,
            0,
        )
        .unwrap();
        let spec = LearnerSpec::centroid();
        // Train the columns by hand, then break column 0.
        let good = train_column(&matrix, &spec, &data, 1).unwrap();
        let broken = ColumnModel { model: None, values: alloc::vec![1, 2, 3] };
        let model =
            assemble(matrix.clone(), spec, Distance::Absolute, alloc::vec![broken, good])
                .unwrap();
        assert_eq!(model.active_columns(), alloc::vec![1]);
        assert_eq!(model.degenerate_columns(), alloc::vec![0]);
        // Full-matrix separation is 1 (rows 1 and 2 differ only in
        // column 0); restricted to column 1, rows 1 and 2 coincide.
        assert_eq!(model.rho(), 0.0);
        assert!(matches!(margin_violations(&model, &data), Err(EcocError::UndefinedBound)));
        // Decoding still works, ignoring the dead column.
        let predictions = predict(&model, &data.features).unwrap();
        // Classes 1 and 2 share column 1's value 1, so ties go to class 1.
        assert!(predictions.iter().all(|&p| p == 1 || p == 3));
    }

    #[test]
    fn assemble_rejects_all_degenerate_and_mismatched_columns() {
        let matrix = seven_class_example();
        let spec = LearnerSpec::centroid();
        let dead = ColumnModel { model: None, values: alloc::vec![] };
        let err = assemble(
            matrix.clone(),
            spec,
            Distance::Hamming,
            alloc::vec![dead.clone(); 6],
        );
        assert!(matches!(err, Err(EcocError::UntrainableMatrix)));
        let err = assemble(matrix, spec, Distance::Hamming, alloc::vec![dead; 3]);
        assert!(matches!(err, Err(EcocError::DimensionMismatch { .. })));
    }

    #[test]
    fn margin_violations_are_zero_for_real_models() {
        for decoding in [Distance::Hamming, Distance::Absolute] {
            let data = make_blobs(5, 20, 3, 1.8, 33).unwrap();
            let matrix = coding::generate(Scheme::Nary, 5, 10, 4, 3).unwrap();
            let model =
                train(&matrix, &LearnerSpec::tree().with_seed(1), decoding, &data).unwrap();
            // Plenty of noise: some instances are misclassified, yet
            // every one of them keeps the guaranteed margin.
            assert_eq!(margin_violations(&model, &data).unwrap(), 0);
        }
    }

    #[test]
    fn evaluate_rejects_out_of_range_labels() {
        let (model, data) = trained_blob_model(Distance::Hamming);
        let mut bad = data.clone();
        bad.labels[0] = 9;
        bad.n_classes = 9;
        assert!(matches!(
            evaluate(&model, &bad),
            Err(EcocError::LabelOutOfRange { .. })
        ));
    }
}
