use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::InferenceError;
use crate::align::AlignedDataset;
use crate::logistic::{fit_logistic, FitConfig, FitResult, LogisticParams};
use crate::rng::{substream, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapEnsemble {
    pub n_iter: usize,
    /// Canonical parameters of every converged replicate, in iteration order.
    pub param_sets: Vec<LogisticParams>,
    pub failed_fits: usize,
    pub seed: u64,
}

impl BootstrapEnsemble {
    pub fn lower_plateaus(&self) -> Vec<f64> {
        self.param_sets.iter().map(|p| p.b).collect()
    }

    pub fn upper_plateaus(&self) -> Vec<f64> {
        self.param_sets.iter().map(|p| p.a + p.b).collect()
    }
}

/// Resample whole regions with replacement and refit the pooled points of
/// each replicate, starting from the full-data parameters.
pub fn bootstrap_fits(
    aligned: &AlignedDataset,
    full_fit: &FitResult,
    n_iter: usize,
    seed: u64,
    config: &FitConfig,
) -> Result<BootstrapEnsemble, InferenceError> {
    let n_regions = aligned.regions.len();
    if n_regions < 2 {
        return Err(InferenceError::TooFewRegions(n_regions));
    }
    if n_iter == 0 {
        return Err(InferenceError::ZeroRepeats);
    }
    let per_region: Vec<Vec<(f64, f64)>> = aligned.regions.iter().map(|r| r.points().collect()).collect();
    let fits: Vec<Option<LogisticParams>> = (0..n_iter)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, Stream::Bootstrap, i as u64);
            let mut pooled = Vec::new();
            for _ in 0..n_regions {
                pooled.extend_from_slice(&per_region[rng.random_range(0..n_regions)]);
            }
            fit_logistic(&pooled, full_fit.params, config).ok().filter(|f| f.converged).map(|f| f.params)
        })
        .collect();
    let param_sets: Vec<LogisticParams> = fits.into_iter().flatten().collect();
    if param_sets.is_empty() {
        return Err(InferenceError::AllFitsFailed(n_iter));
    }
    Ok(BootstrapEnsemble { n_iter, failed_fits: n_iter - param_sets.len(), param_sets, seed })
}
