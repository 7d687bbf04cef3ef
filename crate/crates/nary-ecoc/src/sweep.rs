//! Deterministic sweep experiments over the coding alphabet size, the
//! code length, and the column-correlation profile of random schemes.
//!
//! Each sweep is a pure function of its configuration: every random
//! draw flows from the master seed through per-cell derived seeds, so
//! re-running a sweep reproduces its table byte for byte.

use nary_ecoc_core::coding::{self, Scheme};
use nary_ecoc_core::datasets::Dataset;
use nary_ecoc_core::derive_seed;
use nary_ecoc_core::ensemble::{self, EcocModel};
use nary_ecoc_core::error::{EcocError, Result};
use nary_ecoc_core::learners::LearnerSpec;
use nary_ecoc_core::metrics::{self, Distance};

use crate::parallel;

/// Shared knobs for the training sweeps.
#[derive(Debug, Clone)]
pub struct SweepSettings {
    pub learner: LearnerSpec,
    pub decoding: Distance,
    /// Candidate matrices generated per cell; the best by minimum
    /// absolute row distance is kept.
    pub pool: usize,
    /// Independent matrix draws per swept value.
    pub reps: usize,
    pub seed: u64,
    /// Worker threads (0 = rayon default).
    pub jobs: usize,
}

/// One line of the alphabet-size sweep: a repetition (`rep` is the
/// 0-based index) or the per-`n` mean over successful repetitions
/// (`rep` is `None`).
#[derive(Debug, Clone, PartialEq)]
pub struct SweepNRow {
    pub n: u32,
    pub rep: Option<usize>,
    pub accuracy: Option<f64>,
    pub rho: Option<f64>,
    pub b_bar: Option<f64>,
    pub b_bar_over_rho: Option<f64>,
    pub bound: Option<f64>,
    /// Empty on success; otherwise the error that emptied the row's
    /// missing fields.
    pub note: String,
}

/// One line of the code-length sweep: mean test accuracy over
/// repetitions for one (alphabet size, code length) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepLengthRow {
    pub n: u32,
    pub code_length: usize,
    pub accuracy: Option<f64>,
    pub note: String,
}

/// One line of the correlation study: mean over seeds of the mean
/// absolute column Pearson correlation of freshly generated matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRow {
    pub scheme: Scheme,
    pub code_length: usize,
    pub mean_abs_pcc: f64,
}

fn check_splits(train: &Dataset, test: &Dataset) -> Result<()> {
    if train.n_classes != test.n_classes {
        return Err(EcocError::DimensionMismatch {
            expected: train.n_classes as usize,
            got: test.n_classes as usize,
        });
    }
    Ok(())
}

fn check_settings(settings: &SweepSettings) -> Result<()> {
    settings.learner.validate()?;
    if settings.pool < 1 {
        return Err(EcocError::InvalidParameters("pool must be at least 1".into()));
    }
    if settings.reps < 1 {
        return Err(EcocError::InvalidParameters("reps must be at least 1".into()));
    }
    Ok(())
}

/// Trains and scores one sweep cell. The matrix is chosen from a pool
/// seeded by `cell_seed`, trained on `train`, and scored on `test`.
fn run_cell(
    n: u32,
    code_length: usize,
    cell_seed: u64,
    settings: &SweepSettings,
    train: &Dataset,
    test: &Dataset,
) -> Result<(EcocModel, f64)> {
    let matrix = parallel::select_best_parallel(
        Scheme::Nary,
        train.n_classes as usize,
        code_length,
        n,
        settings.pool,
        cell_seed,
        settings.jobs,
    )?;
    let model = parallel::train_parallel(
        &matrix,
        &settings.learner,
        settings.decoding,
        train,
        settings.jobs,
    )?;
    let accuracy = ensemble::evaluate(&model, test)?.accuracy;
    Ok((model, accuracy))
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// Sweeps the alphabet size `n` over `n_values` at a fixed code
/// length, recording test accuracy and the bound diagnostics for every
/// repetition plus a mean row per `n`. A failed repetition keeps its
/// row with the error in `note`; it never aborts the sweep.
pub fn sweep_n(
    n_values: &[u32],
    code_length: usize,
    settings: &SweepSettings,
    train: &Dataset,
    test: &Dataset,
) -> Result<Vec<SweepNRow>> {
    check_settings(settings)?;
    check_splits(train, test)?;
    if n_values.is_empty() {
        return Err(EcocError::InvalidParameters("empty n range".into()));
    }
    for &n in n_values {
        if n < 2 || n as usize > train.n_classes as usize {
            return Err(EcocError::InvalidParameters(format!(
                "n must lie in [2, {}], got {n}",
                train.n_classes
            )));
        }
    }

    let mut rows = Vec::new();
    for &n in n_values {
        let n_seed = derive_seed(settings.seed, n as u64);
        let mut accuracies = Vec::new();
        let mut rhos = Vec::new();
        let mut b_bars = Vec::new();
        let mut ratios = Vec::new();
        let mut bounds = Vec::new();
        for rep in 0..settings.reps {
            let cell_seed = derive_seed(n_seed, rep as u64);
            let mut row = SweepNRow {
                n,
                rep: Some(rep),
                accuracy: None,
                rho: None,
                b_bar: None,
                b_bar_over_rho: None,
                bound: None,
                note: String::new(),
            };
            match run_cell(n, code_length, cell_seed, settings, train, test) {
                Err(e) => row.note = note_text(&e),
                Ok((model, accuracy)) => {
                    row.accuracy = Some(accuracy);
                    accuracies.push(accuracy);
                    match metrics::bound_report(&model, test) {
                        Err(e) => row.note = note_text(&e),
                        Ok(report) => {
                            let ratio = report.b_bar / report.rho;
                            row.rho = Some(report.rho);
                            row.b_bar = Some(report.b_bar);
                            row.b_bar_over_rho = Some(ratio);
                            row.bound = Some(report.bound);
                            rhos.push(report.rho);
                            b_bars.push(report.b_bar);
                            ratios.push(ratio);
                            bounds.push(report.bound);
                        }
                    }
                }
            }
            rows.push(row);
        }
        rows.push(SweepNRow {
            n,
            rep: None,
            accuracy: mean(&accuracies),
            rho: mean(&rhos),
            b_bar: mean(&b_bars),
            b_bar_over_rho: mean(&ratios),
            bound: mean(&bounds),
            note: String::new(),
        });
    }
    Ok(rows)
}

/// Sweeps the code length for each alphabet size, reporting mean test
/// accuracy over repetitions per (n, length) cell. A cell whose every
/// repetition fails keeps its row with the first error in `note`.
pub fn sweep_length(
    n_values: &[u32],
    lengths: &[usize],
    settings: &SweepSettings,
    train: &Dataset,
    test: &Dataset,
) -> Result<Vec<SweepLengthRow>> {
    check_settings(settings)?;
    check_splits(train, test)?;
    if n_values.is_empty() || lengths.is_empty() {
        return Err(EcocError::InvalidParameters("empty sweep range".into()));
    }
    for &n in n_values {
        if n < 2 || n as usize > train.n_classes as usize {
            return Err(EcocError::InvalidParameters(format!(
                "n must lie in [2, {}], got {n}",
                train.n_classes
            )));
        }
    }
    for &length in lengths {
        if length < 1 {
            return Err(EcocError::InvalidParameters("code length must be at least 1".into()));
        }
    }

    let mut rows = Vec::new();
    for &n in n_values {
        let n_seed = derive_seed(settings.seed, n as u64);
        for &length in lengths {
            let cell_base = derive_seed(n_seed, length as u64);
            let mut accuracies = Vec::new();
            let mut note = String::new();
            for rep in 0..settings.reps {
                let cell_seed = derive_seed(cell_base, rep as u64);
                match run_cell(n, length, cell_seed, settings, train, test) {
                    Ok((_, accuracy)) => accuracies.push(accuracy),
                    Err(e) => {
                        if note.is_empty() {
                            note = note_text(&e);
                        }
                    }
                }
            }
            let accuracy = mean(&accuracies);
            if accuracy.is_some() {
                note.clear();
            }
            rows.push(SweepLengthRow { n, code_length: length, accuracy, note });
        }
    }
    Ok(rows)
}

/// Measures how correlated the columns of freshly generated matrices
/// are, per scheme and code length, averaged over `n_seeds` independent
/// draws. Signed schemes always use the binary alphabet; `n` applies to
/// the n-ary scheme.
pub fn correlation(
    schemes: &[Scheme],
    n_classes: usize,
    n: u32,
    lengths: &[usize],
    n_seeds: usize,
    seed: u64,
) -> Result<Vec<CorrelationRow>> {
    if schemes.is_empty() || lengths.is_empty() {
        return Err(EcocError::InvalidParameters("empty sweep range".into()));
    }
    if n_seeds < 1 {
        return Err(EcocError::InvalidParameters("seeds must be at least 1".into()));
    }
    for &scheme in schemes {
        if !scheme.is_random() {
            return Err(EcocError::InvalidParameters(format!(
                "correlation sweep needs a random scheme, not {scheme}"
            )));
        }
    }

    let mut rows = Vec::new();
    for &scheme in schemes {
        let alphabet = if scheme == Scheme::Nary { n } else { 2 };
        for &length in lengths {
            let mut total = 0.0;
            for k in 0..n_seeds {
                let matrix_seed = derive_seed(seed, k as u64);
                let matrix = coding::generate(scheme, n_classes, length, alphabet, matrix_seed)?;
                total += metrics::matrix_report(&matrix).mean_column_pcc;
            }
            rows.push(CorrelationRow {
                scheme,
                code_length: length,
                mean_abs_pcc: total / n_seeds as f64,
            });
        }
    }
    Ok(rows)
}

/// Flattens an error message onto one CSV-safe line.
fn note_text(error: &EcocError) -> String {
    format!("{error}").replace(',', ";").replace('\n', " ")
}

fn push_field(out: &mut String, value: Option<f64>) {
    out.push(',');
    if let Some(v) = value {
        out.push_str(&format!("{v}"));
    }
}

/// Renders the alphabet-size sweep as CSV. The `rep` column holds the
/// repetition index or `mean` for the per-`n` average row.
pub fn render_sweep_n_csv(rows: &[SweepNRow]) -> String {
    let mut out = String::from("n,rep,accuracy,rho,b_bar,b_bar_over_rho,bound,note\n");
    for row in rows {
        out.push_str(&format!("{}", row.n));
        out.push(',');
        match row.rep {
            Some(rep) => out.push_str(&format!("{rep}")),
            None => out.push_str("mean"),
        }
        push_field(&mut out, row.accuracy);
        push_field(&mut out, row.rho);
        push_field(&mut out, row.b_bar);
        push_field(&mut out, row.b_bar_over_rho);
        push_field(&mut out, row.bound);
        out.push(',');
        out.push_str(&row.note);
        out.push('\n');
    }
    out
}

/// Renders the code-length sweep as CSV, one row per (n, length) cell.
pub fn render_sweep_length_csv(rows: &[SweepLengthRow]) -> String {
    let mut out = String::from("n,code_length,accuracy,note\n");
    for row in rows {
        out.push_str(&format!("{},{}", row.n, row.code_length));
        push_field(&mut out, row.accuracy);
        out.push(',');
        out.push_str(&row.note);
        out.push('\n');
    }
    out
}

/// Renders the correlation study as CSV, one row per (scheme, length).
pub fn render_correlation_csv(rows: &[CorrelationRow]) -> String {
    let mut out = String::from("scheme,code_length,mean_abs_pcc\n");
    for row in rows {
        out.push_str(&format!("{},{},{}\n", row.scheme, row.code_length, row.mean_abs_pcc));
    }
    out
}
