use serde::{Deserialize, Serialize};

use super::{BootstrapEnsemble, InferenceError};
use crate::stats;

/// Conservative plateau bounds from the bootstrap moments:
/// `th1 = mean(b) + k sd(b)` and `th2 = mean(a + b) - k sd(a + b)`, with
/// population standard deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateauThresholds {
    pub k_sigma: f64,
    pub th1: f64,
    pub th2: f64,
    pub mean_lower: f64,
    pub sd_lower: f64,
    pub mean_upper: f64,
    pub sd_upper: f64,
}

pub fn plateau_thresholds(ensemble: &BootstrapEnsemble, k_sigma: f64) -> Result<PlateauThresholds, InferenceError> {
    if ensemble.param_sets.is_empty() {
        return Err(InferenceError::EmptyEnsemble);
    }
    if !(k_sigma > 0.0 && k_sigma.is_finite()) {
        return Err(InferenceError::InvalidKSigma(k_sigma));
    }
    let lower = ensemble.lower_plateaus();
    let upper = ensemble.upper_plateaus();
    let (mean_lower, sd_lower) = (stats::mean(&lower), stats::std_dev(&lower, 0));
    let (mean_upper, sd_upper) = (stats::mean(&upper), stats::std_dev(&upper, 0));
    let th1 = mean_lower + k_sigma * sd_lower;
    let th2 = mean_upper - k_sigma * sd_upper;
    if th1 >= th2 {
        return Err(InferenceError::InvertedThresholds { th1, th2 });
    }
    Ok(PlateauThresholds { k_sigma, th1, th2, mean_lower, sd_lower, mean_upper, sd_upper })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimescaleEstimate {
    pub k_sigma: f64,
    pub th1: f64,
    pub th2: f64,
    /// Mean time at which the crossing curves reach `th1`.
    pub t1_mean: f64,
    pub t2_mean: f64,
    /// Mean of the per-curve durations; equals `t2_mean - t1_mean`.
    pub duration_mean: f64,
    pub n_crossing_curves: usize,
    /// Curves whose asymptotes do not bracket both thresholds.
    pub n_excluded: usize,
    pub per_curve_durations: Vec<f64>,
}

/// Time each bootstrap curve spends between the two thresholds.
pub fn characteristic_timescale(
    ensemble: &BootstrapEnsemble,
    thresholds: &PlateauThresholds,
) -> Result<TimescaleEstimate, InferenceError> {
    let (th1, th2) = (thresholds.th1, thresholds.th2);
    if th1 >= th2 {
        return Err(InferenceError::InvertedThresholds { th1, th2 });
    }
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    for p in &ensemble.param_sets {
        if let (Ok(a), Ok(b)) = (p.inverse(th1), p.inverse(th2)) {
            t1.push(a);
            t2.push(b);
        }
    }
    if t1.is_empty() {
        return Err(InferenceError::NoCrossingCurves { th1, th2 });
    }
    let per_curve_durations: Vec<f64> = t1.iter().zip(&t2).map(|(a, b)| b - a).collect();
    Ok(TimescaleEstimate {
        k_sigma: thresholds.k_sigma,
        th1,
        th2,
        t1_mean: stats::mean(&t1),
        t2_mean: stats::mean(&t2),
        duration_mean: stats::mean(&per_curve_durations),
        n_crossing_curves: t1.len(),
        n_excluded: ensemble.param_sets.len() - t1.len(),
        per_curve_durations,
    })
}
