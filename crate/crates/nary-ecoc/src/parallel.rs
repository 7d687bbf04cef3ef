//! Rayon-backed drivers that parallelize the two embarrassingly
//! parallel stages — per-column training and pool selection — while
//! producing bit-identical results to their sequential counterparts.

use nary_ecoc_core::coding::{self, CodingMatrix, Scheme};
use nary_ecoc_core::datasets::Dataset;
use nary_ecoc_core::ensemble::{self, EcocModel};
use nary_ecoc_core::learners::LearnerSpec;
use nary_ecoc_core::metrics::{self, Distance};
use nary_ecoc_core::error::{EcocError, Result};
use rayon::prelude::*;

/// Runs `f` on a dedicated pool of `jobs` threads, or on rayon's
/// global pool when `jobs` is 0.
fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| EcocError::InvalidParameters(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Trains one base learner per matrix column across worker threads.
///
/// Column `s` is trained with the same derived seed the sequential
/// trainer uses, and columns are reassembled in matrix order, so the
/// resulting model is identical to [`ensemble::train`].
pub fn train_parallel(
    matrix: &CodingMatrix,
    spec: &LearnerSpec,
    decoding: Distance,
    data: &Dataset,
    jobs: usize,
) -> Result<EcocModel> {
    spec.validate()?;
    if data.n_classes as usize != matrix.n_classes() {
        return Err(EcocError::DimensionMismatch {
            expected: matrix.n_classes(),
            got: data.n_classes as usize,
        });
    }
    if let Some(missing) = data.class_counts().iter().position(|&c| c == 0) {
        return Err(EcocError::InvalidParameters(format!(
            "class {} has no training instances",
            missing + 1
        )));
    }
    let columns = with_pool(jobs, || {
        (0..matrix.code_length())
            .into_par_iter()
            .map(|s| ensemble::train_column(matrix, spec, data, s))
            .collect::<Result<Vec<_>>>()
    })??;
    ensemble::assemble(matrix.clone(), *spec, decoding, columns)
}

/// Generates `pool_size` candidate matrices across worker threads and
/// keeps the one with the largest minimum pairwise absolute row
/// distance, breaking ties by the smallest pool index.
///
/// Member `k` uses [`coding::pool_member_seed`], and the (rho, index)
/// maximum is associative, so the winner matches [`coding::select_best`]
/// regardless of how rayon splits the range.
pub fn select_best_parallel(
    scheme: Scheme,
    n_classes: usize,
    code_length: usize,
    n: u32,
    pool_size: usize,
    seed: u64,
    jobs: usize,
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
    let best = with_pool(jobs, || {
        (0..pool_size)
            .into_par_iter()
            .map(|k| {
                let member_seed = coding::pool_member_seed(seed, k);
                let candidate = coding::generate(scheme, n_classes, code_length, n, member_seed)?;
                let rho = metrics::min_row_distance(&candidate, Distance::Absolute);
                Ok((rho, k, candidate))
            })
            .try_reduce_with(|a, b| {
                // Strict > keeps the earliest member on ties, mirroring
                // the sequential scan's "first best wins" rule.
                Ok(if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
            })
    })?;
    match best {
        Some(result) => result.map(|(_, _, matrix)| matrix),
        None => unreachable!("pool_size >= 1"),
    }
}
