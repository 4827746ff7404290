use serde::{Deserialize, Serialize};

use super::InferenceError;
use crate::align::{extract_central_sequence, AlignedDataset, CentralSegment};
use crate::dataset::ContinuityMode;
use crate::logistic::{fit_logistic, FitConfig, FitResult};

const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuityFit {
    pub mode: ContinuityMode,
    pub fit: FitResult,
    pub segments: Vec<CentralSegment>,
    /// Retained regions whose zero point lies outside the labelled sequence.
    pub excluded: Vec<String>,
    /// Mean point count over `segments`.
    pub mean_length: f64,
    /// `(region, length)`, longest first, ties by name.
    pub ranking: Vec<(String, usize)>,
}

/// Refit the logistic curve on the central continuous segments only.
pub fn continuity_comparison(
    aligned: &AlignedDataset,
    full_fit: &FitResult,
    mode: ContinuityMode,
    config: &FitConfig,
) -> Result<ContinuityFit, InferenceError> {
    let mut segments = Vec::new();
    let mut excluded = Vec::new();
    for region in &aligned.regions {
        match extract_central_sequence(region, mode) {
            Ok(seg) => segments.push(seg),
            Err(_) => excluded.push(region.nga().to_string()),
        }
    }
    let pooled: Vec<(f64, f64)> =
        segments.iter().flat_map(|s| s.points.iter().map(|p| (p.rel_time as f64, p.spc1))).collect();
    if segments.len() < 2 || pooled.len() < MIN_POINTS {
        return Err(InferenceError::ContinuityInfeasible { mode, segments: segments.len(), points: pooled.len() });
    }
    let fit = fit_logistic(&pooled, full_fit.params, config)?;
    let mut ranking: Vec<(String, usize)> = segments.iter().map(|s| (s.nga.clone(), s.len())).collect();
    ranking.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mean_length = pooled.len() as f64 / segments.len() as f64;
    Ok(ContinuityFit { mode, fit, segments, excluded, mean_length, ranking })
}
