use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::InferenceError;
use crate::align::AlignedDataset;
use crate::logistic::{coefficient_of_prediction, fit_logistic, FitConfig, FitResult};
use crate::rng::{substream, Stream};
use crate::stats;

const MIN_POOLED: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_repeats: usize,
    /// Coefficient of prediction on the test half, for every repeat whose
    /// training fit converged, in repeat order.
    pub rho2_values: Vec<f64>,
    pub failed: usize,
    pub mean_rho2: f64,
    /// Sample standard deviation of `rho2_values`.
    pub std_rho2: f64,
    /// Standard error of `mean_rho2`.
    pub stderr_rho2: f64,
    pub seed: u64,
}

/// Repeated random half splits of the pooled points: fit on one half from
/// the full-data parameters, score the other half.
pub fn out_of_sample_validation(
    aligned: &AlignedDataset,
    full_fit: &FitResult,
    n_repeats: usize,
    seed: u64,
    config: &FitConfig,
) -> Result<ValidationReport, InferenceError> {
    if n_repeats == 0 {
        return Err(InferenceError::ZeroRepeats);
    }
    let pooled = aligned.pooled_points();
    if pooled.len() < MIN_POOLED {
        return Err(InferenceError::TooFewPoints { needed: MIN_POOLED, got: pooled.len() });
    }
    let outcomes: Vec<Option<f64>> = (0..n_repeats)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, Stream::Validation, i as u64);
            let mut order: Vec<usize> = (0..pooled.len()).collect();
            order.shuffle(&mut rng);
            let (train_idx, test_idx) = order.split_at(pooled.len() / 2);
            let train: Vec<(f64, f64)> = train_idx.iter().map(|&k| pooled[k]).collect();
            let fit = fit_logistic(&train, full_fit.params, config).ok().filter(|f| f.converged)?;
            let predicted: Vec<f64> = test_idx.iter().map(|&k| fit.params.eval(pooled[k].0)).collect();
            let actual: Vec<f64> = test_idx.iter().map(|&k| pooled[k].1).collect();
            coefficient_of_prediction(&predicted, &actual).ok()
        })
        .collect();
    let rho2_values: Vec<f64> = outcomes.iter().flatten().copied().collect();
    if rho2_values.is_empty() {
        return Err(InferenceError::AllFitsFailed(n_repeats));
    }
    let n = rho2_values.len();
    let std_rho2 = if n > 1 { stats::std_dev(&rho2_values, 1) } else { 0.0 };
    Ok(ValidationReport {
        n_repeats,
        failed: n_repeats - n,
        mean_rho2: stats::mean(&rho2_values),
        std_rho2,
        stderr_rho2: std_rho2 / (n as f64).sqrt(),
        rho2_values,
        seed,
    })
}
