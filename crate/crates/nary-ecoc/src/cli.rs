//! Command-line surface: matrix generation and analysis, ensemble
//! training and evaluation, and the three sweep studies.
//!
//! Every command validates its whole configuration before doing any
//! work, and all randomness flows from `--seed` (or `NARY_ECOC_SEED`),
//! so rerunning a command with the same flags reproduces its output
//! byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use nary_ecoc_core::coding::{self, CodingMatrix, Scheme};
use nary_ecoc_core::datasets::{self, Dataset};
use nary_ecoc_core::derive_seed;
use nary_ecoc_core::ensemble::{self, EcocModel};
use nary_ecoc_core::learners::{LearnerKind, LearnerSpec};
use nary_ecoc_core::metrics::{self, BoundReport, Distance};
use nary_ecoc_core::EcocError;
use serde::Serialize;

use crate::error::{AppError, Result};
use crate::io::csv_data::{self, LabelColumn};
use crate::io::{matrix_csv, model_store, sparse};
use crate::{parallel, sweep};

/// Seed-derivation tag for train/test splitting, chosen outside the
/// small-integer range used for per-`n` sweep chains.
const TAG_SPLIT: u64 = 0x5350_4C49_5421;

#[derive(Parser, Debug)]
#[command(
    name = "nary-ecoc",
    version,
    about = "Error-correcting output codes over n-ary alphabets: \
             matrix generation, analysis, training, evaluation, and sweep studies"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a coding matrix and write it as CSV
    Gen(GenArgs),
    /// Report distance and correlation diagnostics of a matrix file
    Analyze(AnalyzeArgs),
    /// Train a per-column ensemble and save the model archive
    Train(TrainArgs),
    /// Evaluate a saved model on labeled data
    Eval(EvalArgs),
    /// Sweep the alphabet size n at fixed code length
    SweepN(SweepNArgs),
    /// Sweep the code length for each alphabet size
    SweepLen(SweepLenArgs),
    /// Compare column correlation across schemes and code lengths
    Correlation(CorrelationArgs),
}

fn parse_scheme(s: &str) -> std::result::Result<Scheme, String> {
    Scheme::parse(s).map_err(|e| e.to_string())
}

fn parse_distance(s: &str) -> std::result::Result<Distance, String> {
    Distance::parse(s).map_err(|e| e.to_string())
}

fn parse_learner(s: &str) -> std::result::Result<LearnerKind, String> {
    LearnerKind::parse(s).map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
struct SeedArg {
    /// Master random seed (falls back to NARY_ECOC_SEED, then 0)
    #[arg(long, env = "NARY_ECOC_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct JobsArg {
    /// Worker threads for pool scanning and column training (0 = all cores)
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

/// Labeled data comes from a file or from generated Gaussian blobs.
#[derive(Args, Debug)]
struct DataArgs {
    /// Labeled data file (sparse `label index:value` or CSV)
    #[arg(long, conflicts_with_all = ["classes", "per_class", "dim", "spread", "blob_seed"])]
    data: Option<PathBuf>,

    /// Data file format; `auto` picks csv for a .csv extension, else sparse
    #[arg(long, default_value = "auto", value_parser = ["auto", "sparse", "csv"])]
    format: String,

    /// CSV label column: `last` or a 0-based column index
    #[arg(long, default_value = "last")]
    label_col: String,

    /// Skip the first line of a CSV file
    #[arg(long)]
    has_header: bool,

    /// Generate this many Gaussian blob classes instead of reading a file
    #[arg(long)]
    classes: Option<u32>,

    /// Blob instances per class
    #[arg(long, default_value_t = 50)]
    per_class: usize,

    /// Blob feature dimension
    #[arg(long, default_value_t = 8)]
    dim: usize,

    /// Blob within-class standard deviation
    #[arg(long, default_value_t = 1.0)]
    spread: f64,

    /// Seed identifying the generated blob dataset (independent of --seed)
    #[arg(long, default_value_t = 0)]
    blob_seed: u64,
}

impl DataArgs {
    fn load(&self) -> Result<Dataset> {
        match (&self.data, self.classes) {
            (Some(path), None) => {
                let format = match self.format.as_str() {
                    "auto" => match path.extension().and_then(|e| e.to_str()) {
                        Some(ext) if ext.eq_ignore_ascii_case("csv") => "csv",
                        _ => "sparse",
                    },
                    explicit => explicit,
                };
                if format == "csv" {
                    let label_col = match self.label_col.as_str() {
                        "last" => LabelColumn::Last,
                        text => LabelColumn::Index(text.parse().map_err(|_| {
                            usage(format!("--label-col must be `last` or an index, got `{text}`"))
                        })?),
                    };
                    csv_data::load_csv(path, label_col, self.has_header)
                } else {
                    sparse::load_sparse(path)
                }
            }
            (None, Some(classes)) => Ok(datasets::make_blobs(
                classes,
                self.per_class,
                self.dim,
                self.spread,
                self.blob_seed,
            )?),
            (None, None) => Err(usage("provide labeled data with --data or --classes")),
            (Some(_), Some(_)) => unreachable!("clap rejects --data with --classes"),
        }
    }
}

/// Base-learner choice and hyperparameters shared by train and sweeps.
#[derive(Args, Debug)]
struct LearnerArgs {
    /// Base learner: lr, tree, or centroid
    #[arg(long, value_parser = parse_learner, default_value = "lr")]
    learner: LearnerKind,

    /// Gradient-descent step size (lr learner)
    #[arg(long)]
    learning_rate: Option<f64>,

    /// Training epochs (lr learner)
    #[arg(long)]
    epochs: Option<usize>,

    /// L2 penalty on weights (lr learner)
    #[arg(long)]
    l2: Option<f64>,

    /// Depth cap (tree learner)
    #[arg(long)]
    max_depth: Option<usize>,

    /// Minimum instances per leaf (tree learner)
    #[arg(long)]
    min_leaf: Option<usize>,
}

impl LearnerArgs {
    fn spec(&self, seed: u64) -> Result<LearnerSpec> {
        let mut spec = LearnerSpec::for_kind(self.learner).with_seed(seed);
        if let Some(v) = self.learning_rate {
            spec.learning_rate = v;
        }
        if let Some(v) = self.epochs {
            spec.epochs = v;
        }
        if let Some(v) = self.l2 {
            spec.l2 = v;
        }
        if let Some(v) = self.max_depth {
            spec.max_depth = v;
        }
        if let Some(v) = self.min_leaf {
            spec.min_leaf = v;
        }
        spec.validate().map_err(|e| usage(format!("{e}")))?;
        Ok(spec)
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Coding scheme: ova, ovo, dense, sparse, or nary
    #[arg(long, value_parser = parse_scheme)]
    scheme: Scheme,

    /// Number of classes (matrix rows)
    #[arg(long)]
    classes: usize,

    /// Matrix columns; defaults to the scheme's canonical length
    #[arg(long)]
    length: Option<usize>,

    /// Alphabet size for the n-ary scheme (signed schemes are binary)
    #[arg(long)]
    n: Option<u32>,

    /// Candidates generated; the best minimum absolute row distance wins
    #[arg(long, default_value_t = 1)]
    pool: usize,

    /// Output matrix file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    jobs: JobsArg,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Matrix file to analyze
    matrix: PathBuf,

    /// Output report file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Pre-generated matrix file (otherwise one is generated from --scheme)
    #[arg(long, conflicts_with_all = ["scheme", "n", "length", "pool"])]
    matrix: Option<PathBuf>,

    /// Coding scheme for the generated matrix
    #[arg(long, value_parser = parse_scheme, default_value = "nary")]
    scheme: Scheme,

    /// Alphabet size for the n-ary scheme
    #[arg(long)]
    n: Option<u32>,

    /// Matrix columns; defaults to the scheme's canonical length
    #[arg(long)]
    length: Option<usize>,

    /// Candidates generated; the best minimum absolute row distance wins
    #[arg(long, default_value_t = 1)]
    pool: usize,

    #[command(flatten)]
    learner: LearnerArgs,

    /// Decoding distance: hamming or absolute
    #[arg(long, value_parser = parse_distance, default_value = "hamming")]
    decoding: Distance,

    /// Model archive directory to create
    #[arg(long)]
    out: PathBuf,

    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    jobs: JobsArg,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Model archive directory written by train
    #[arg(long)]
    model: PathBuf,

    #[command(flatten)]
    data: DataArgs,

    /// Output report file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    #[command(flatten)]
    jobs: JobsArg,
}

#[derive(Args, Debug)]
pub struct SweepNArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Smallest alphabet size to sweep
    #[arg(long, default_value_t = 2)]
    n_min: u32,

    /// Largest alphabet size to sweep (must not exceed the class count)
    #[arg(long, default_value_t = 10)]
    n_max: u32,

    /// Matrix columns; defaults to the n-ary canonical length
    #[arg(long)]
    length: Option<usize>,

    /// Independent matrix draws per swept value
    #[arg(long, default_value_t = 10)]
    reps: usize,

    /// Candidates generated per draw; best minimum absolute distance wins
    #[arg(long, default_value_t = 1)]
    pool: usize,

    /// Fraction of instances trained on; the rest are scored
    #[arg(long, default_value_t = 0.7)]
    train_frac: f64,

    #[command(flatten)]
    learner: LearnerArgs,

    /// Decoding distance: hamming or absolute
    #[arg(long, value_parser = parse_distance, default_value = "hamming")]
    decoding: Distance,

    /// Output CSV file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    jobs: JobsArg,
}

#[derive(Args, Debug)]
pub struct SweepLenArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Smallest alphabet size to sweep
    #[arg(long, default_value_t = 2)]
    n_min: u32,

    /// Largest alphabet size to sweep (must not exceed the class count)
    #[arg(long, default_value_t = 5)]
    n_max: u32,

    /// Code lengths to sweep
    #[arg(long, value_delimiter = ',', default_values_t = vec![5usize, 10, 20, 40])]
    lengths: Vec<usize>,

    /// Independent matrix draws per cell
    #[arg(long, default_value_t = 10)]
    reps: usize,

    /// Candidates generated per draw; best minimum absolute distance wins
    #[arg(long, default_value_t = 1)]
    pool: usize,

    /// Fraction of instances trained on; the rest are scored
    #[arg(long, default_value_t = 0.7)]
    train_frac: f64,

    #[command(flatten)]
    learner: LearnerArgs,

    /// Decoding distance: hamming or absolute
    #[arg(long, value_parser = parse_distance, default_value = "hamming")]
    decoding: Distance,

    /// Output CSV file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    jobs: JobsArg,
}

#[derive(Args, Debug)]
pub struct CorrelationArgs {
    /// Number of classes (matrix rows)
    #[arg(long, default_value_t = 20)]
    classes: usize,

    /// Alphabet size for the n-ary scheme
    #[arg(long, default_value_t = 5)]
    n: u32,

    /// Code lengths to sweep
    #[arg(long, value_delimiter = ',', default_values_t = vec![10usize, 20, 30, 40, 50, 60, 70, 80])]
    lengths: Vec<usize>,

    /// Independent matrix draws averaged per cell
    #[arg(long, default_value_t = 100)]
    seeds: usize,

    /// Random schemes to compare
    #[arg(long, value_delimiter = ',', value_parser = parse_scheme,
          default_values_t = vec![Scheme::Nary, Scheme::SparseRandom])]
    schemes: Vec<Scheme>,

    /// Output CSV file (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,

    #[command(flatten)]
    seed: SeedArg,
}

/// Matrix diagnostics emitted by `analyze`: identity, observed
/// separations and means, random-code expectations where defined, the
/// scheme's closed-form separation, and column correlation.
#[derive(Serialize)]
struct AnalyzeOutput {
    scheme: String,
    n_classes: usize,
    code_length: usize,
    n: u32,
    seed: u64,
    rho_hamming: f64,
    rho_absolute: f64,
    mean_hamming: f64,
    mean_absolute: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_hamming: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expected_absolute: Option<f64>,
    closed_form_hamming: f64,
    closed_form_absolute: f64,
    mean_column_pcc: f64,
    constant_columns: Vec<usize>,
}

/// Training summary emitted by `train` alongside the model archive.
#[derive(Serialize)]
struct TrainOutput {
    model_dir: String,
    scheme: String,
    n: u32,
    n_classes: usize,
    code_length: usize,
    n_features: usize,
    n_instances: usize,
    learner: String,
    decoding: String,
    rho: f64,
    active_columns: usize,
    degenerate_columns: Vec<usize>,
    seed: u64,
}

/// Evaluation report emitted by `eval`. `bound` and
/// `margin_violations` are omitted when the model's active columns
/// leave zero row separation.
#[derive(Serialize)]
struct EvalOutput {
    accuracy: f64,
    error_rate: f64,
    n_instances: usize,
    n_classes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    margin_violations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound: Option<BoundReport>,
    confusion_pct: Vec<Vec<f64>>,
    precision_pct: Vec<Option<f64>>,
    recall_pct: Vec<Option<f64>>,
}

fn usage(message: impl Into<String>) -> AppError {
    AppError::Usage(message.into())
}

/// Writes a report to `out`, or to stdout when no path is given.
fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| AppError::io(path, e)),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Checks that `alphabet^length` can cover `classes` distinct rows, so
/// impossible generation requests fail as usage errors up front.
fn check_row_capacity(alphabet: u32, length: usize, classes: usize) -> Result<()> {
    let capacity_log = length as f64 * (alphabet as f64).ln();
    if capacity_log < (classes as f64).ln() - 1e-9 {
        return Err(usage(format!(
            "{length} columns over a {alphabet}-symbol alphabet cannot give {classes} distinct rows"
        )));
    }
    Ok(())
}

/// Validates scheme flags and resolves the effective (n, length) pair.
fn resolve_matrix_shape(
    scheme: Scheme,
    classes: usize,
    n: Option<u32>,
    length: Option<usize>,
    pool: usize,
) -> Result<(u32, usize)> {
    if classes < 2 {
        return Err(usage("--classes must be at least 2"));
    }
    if pool < 1 {
        return Err(usage("--pool must be at least 1"));
    }
    if pool > 1 && !scheme.is_random() {
        return Err(usage(format!("--pool only applies to random schemes, not {scheme}")));
    }
    let n = match (scheme, n) {
        (Scheme::Nary, Some(n)) => {
            if n < 2 || n as usize > classes {
                return Err(usage(format!("--n must lie in [2, {classes}], got {n}")));
            }
            n
        }
        (Scheme::Nary, None) => 3.min(classes as u32),
        (_, Some(n)) if n != 2 => {
            return Err(usage(format!("scheme {scheme} is binary; --n {n} is invalid")));
        }
        (_, _) => 2,
    };
    let canonical = coding::default_code_length(scheme, classes);
    let length = match (scheme, length) {
        (Scheme::Ova | Scheme::Ovo, Some(len)) if len != canonical => {
            return Err(usage(format!(
                "scheme {scheme} has a fixed length of {canonical} for {classes} classes"
            )));
        }
        (_, Some(len)) => {
            if len < 1 {
                return Err(usage("--length must be at least 1"));
            }
            len
        }
        (_, None) => canonical,
    };
    match scheme {
        Scheme::Nary | Scheme::DenseRandom => check_row_capacity(n, length, classes)?,
        Scheme::SparseRandom => check_row_capacity(3, length, classes)?,
        Scheme::Ova | Scheme::Ovo => {}
    }
    Ok((n, length))
}

/// Generates a matrix, scanning a candidate pool for random schemes.
fn build_matrix(
    scheme: Scheme,
    classes: usize,
    n: u32,
    length: usize,
    pool: usize,
    seed: u64,
    jobs: usize,
) -> Result<CodingMatrix> {
    let matrix = if pool > 1 {
        parallel::select_best_parallel(scheme, classes, length, n, pool, seed, jobs)?
    } else {
        coding::generate(scheme, classes, length, n, seed)?
    };
    Ok(matrix)
}

fn validate_sweep_range(n_min: u32, n_max: u32, classes: u32) -> Result<Vec<u32>> {
    if n_min < 2 || n_min > n_max {
        return Err(usage(format!("need 2 <= --n-min <= --n-max, got {n_min}..{n_max}")));
    }
    if n_max > classes {
        return Err(usage(format!("--n-max {n_max} exceeds the class count {classes}")));
    }
    Ok((n_min..=n_max).collect())
}

fn split_for_sweep(data: &Dataset, train_frac: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(usage("--train-frac must be strictly between 0 and 1"));
    }
    Ok(datasets::split(data, train_frac, true, derive_seed(seed, TAG_SPLIT))?)
}

fn train_summary(model: &EcocModel, data: &Dataset, out_dir: &Path, seed: u64) -> TrainOutput {
    let matrix = &model.matrix;
    TrainOutput {
        model_dir: out_dir.display().to_string(),
        scheme: matrix.scheme().name().to_string(),
        n: matrix.n(),
        n_classes: matrix.n_classes(),
        code_length: matrix.code_length(),
        n_features: model.n_features(),
        n_instances: data.n_instances(),
        learner: model.learner_spec.kind.name().to_string(),
        decoding: model.decoding.name().to_string(),
        rho: model.rho(),
        active_columns: model.active_columns().len(),
        degenerate_columns: model.degenerate_columns(),
        seed,
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let (n, length) =
        resolve_matrix_shape(args.scheme, args.classes, args.n, args.length, args.pool)?;
    let matrix = build_matrix(
        args.scheme,
        args.classes,
        n,
        length,
        args.pool,
        args.seed.seed,
        args.jobs.jobs,
    )?;
    match &args.out {
        Some(path) => matrix_csv::save_matrix(path, &matrix),
        None => emit(None, &matrix_csv::render_matrix(&matrix)),
    }
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    let matrix = matrix_csv::load_matrix(&args.matrix)?;
    let report = metrics::matrix_report(&matrix);
    let closed_form = |distance| {
        metrics::closed_form_distance(
            matrix.scheme(),
            matrix.n_classes(),
            matrix.code_length(),
            matrix.n(),
            distance,
        )
    };
    let output = AnalyzeOutput {
        scheme: matrix.scheme().name().to_string(),
        n_classes: matrix.n_classes(),
        code_length: matrix.code_length(),
        n: matrix.n(),
        seed: matrix.seed(),
        rho_hamming: report.rho_hamming,
        rho_absolute: report.rho_absolute,
        mean_hamming: report.mean_hamming,
        mean_absolute: report.mean_absolute,
        expected_hamming: report.expected_hamming,
        expected_absolute: report.expected_absolute,
        closed_form_hamming: closed_form(Distance::Hamming)?,
        closed_form_absolute: closed_form(Distance::Absolute)?,
        mean_column_pcc: report.mean_column_pcc,
        constant_columns: report.constant_columns,
    };
    emit(args.out.as_deref(), &to_json(&output)?)
}

fn cmd_train(args: TrainArgs) -> Result<()> {
    let data = args.data.load()?;
    let spec = args.learner.spec(args.seed.seed)?;
    let matrix = match &args.matrix {
        Some(path) => matrix_csv::load_matrix(path)?,
        None => {
            let classes = data.n_classes as usize;
            let (n, length) =
                resolve_matrix_shape(args.scheme, classes, args.n, args.length, args.pool)?;
            build_matrix(args.scheme, classes, n, length, args.pool, args.seed.seed, args.jobs.jobs)?
        }
    };
    let model = parallel::train_parallel(&matrix, &spec, args.decoding, &data, args.jobs.jobs)?;
    model_store::save_model(&args.out, &model)?;
    let summary = train_summary(&model, &data, &args.out, args.seed.seed);
    emit(None, &to_json(&summary)?)
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let model = model_store::load_model(&args.model)?;
    let data = args.data.load()?;
    let report = ensemble::evaluate(&model, &data)?;
    let (margin_violations, bound) = match metrics::bound_report(&model, &data) {
        Ok(bound) => (Some(ensemble::margin_violations(&model, &data)?), Some(bound)),
        Err(EcocError::UndefinedBound) => {
            eprintln!("warning: bound undefined (no active-column separation); omitted");
            (None, None)
        }
        Err(e) => return Err(e.into()),
    };
    let output = EvalOutput {
        accuracy: report.accuracy,
        error_rate: 1.0 - report.accuracy,
        n_instances: report.n_instances,
        n_classes: report.n_classes,
        margin_violations,
        bound,
        confusion_pct: report.confusion_pct,
        precision_pct: report.precision_pct,
        recall_pct: report.recall_pct,
    };
    emit(args.out.as_deref(), &to_json(&output)?)
}

fn cmd_sweep_n(args: SweepNArgs) -> Result<()> {
    let data = args.data.load()?;
    let n_values = validate_sweep_range(args.n_min, args.n_max, data.n_classes)?;
    let length = args
        .length
        .unwrap_or_else(|| coding::default_code_length(Scheme::Nary, data.n_classes as usize));
    if args.pool < 1 {
        return Err(usage("--pool must be at least 1"));
    }
    if args.reps < 1 {
        return Err(usage("--reps must be at least 1"));
    }
    let settings = sweep::SweepSettings {
        learner: args.learner.spec(args.seed.seed)?,
        decoding: args.decoding,
        pool: args.pool,
        reps: args.reps,
        seed: args.seed.seed,
        jobs: args.jobs.jobs,
    };
    let (train, test) = split_for_sweep(&data, args.train_frac, args.seed.seed)?;
    let rows = sweep::sweep_n(&n_values, length, &settings, &train, &test)?;
    emit(args.out.as_deref(), &sweep::render_sweep_n_csv(&rows))
}

fn cmd_sweep_len(args: SweepLenArgs) -> Result<()> {
    let data = args.data.load()?;
    let n_values = validate_sweep_range(args.n_min, args.n_max, data.n_classes)?;
    if args.lengths.is_empty() || args.lengths.contains(&0) {
        return Err(usage("--lengths must list code lengths of at least 1"));
    }
    if args.pool < 1 {
        return Err(usage("--pool must be at least 1"));
    }
    if args.reps < 1 {
        return Err(usage("--reps must be at least 1"));
    }
    let settings = sweep::SweepSettings {
        learner: args.learner.spec(args.seed.seed)?,
        decoding: args.decoding,
        pool: args.pool,
        reps: args.reps,
        seed: args.seed.seed,
        jobs: args.jobs.jobs,
    };
    let (train, test) = split_for_sweep(&data, args.train_frac, args.seed.seed)?;
    let rows = sweep::sweep_length(&n_values, &args.lengths, &settings, &train, &test)?;
    emit(args.out.as_deref(), &sweep::render_sweep_length_csv(&rows))
}

fn cmd_correlation(args: CorrelationArgs) -> Result<()> {
    if args.classes < 2 {
        return Err(usage("--classes must be at least 2"));
    }
    if args.n < 2 || args.n as usize > args.classes {
        return Err(usage(format!("--n must lie in [2, {}], got {}", args.classes, args.n)));
    }
    if args.seeds < 1 {
        return Err(usage("--seeds must be at least 1"));
    }
    if args.lengths.is_empty() || args.lengths.contains(&0) {
        return Err(usage("--lengths must list code lengths of at least 1"));
    }
    for &scheme in &args.schemes {
        if !scheme.is_random() {
            return Err(usage(format!("--schemes accepts random schemes only, not {scheme}")));
        }
    }
    let rows = sweep::correlation(
        &args.schemes,
        args.classes,
        args.n,
        &args.lengths,
        args.seeds,
        args.seed.seed,
    )?;
    emit(args.out.as_deref(), &sweep::render_correlation_csv(&rows))
}

/// Runs one parsed command to completion.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Train(args) => cmd_train(args),
        Command::Eval(args) => cmd_eval(args),
        Command::SweepN(args) => cmd_sweep_n(args),
        Command::SweepLen(args) => cmd_sweep_len(args),
        Command::Correlation(args) => cmd_correlation(args),
    }
}
