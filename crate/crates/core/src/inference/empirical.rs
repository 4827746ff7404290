use serde::{Deserialize, Serialize};

use super::InferenceError;
use crate::align::AlignedDataset;
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionDuration {
    pub nga: String,
    /// Relative time of the first point above `th1`.
    pub tau1: i64,
    /// Relative time of the first point above `th2`.
    pub tau2: i64,
    pub duration: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDurations {
    pub th1: f64,
    pub th2: f64,
    pub per_nga: Vec<RegionDuration>,
    /// Regions that never exceed `th2`.
    pub excluded: Vec<String>,
    pub mean_duration: Option<f64>,
    pub median_duration: Option<f64>,
}

/// Observed time each region takes from first exceeding `th1` to first
/// exceeding `th2`.
pub fn empirical_durations(aligned: &AlignedDataset, th1: f64, th2: f64) -> Result<EmpiricalDurations, InferenceError> {
    if aligned.regions.is_empty() {
        return Err(InferenceError::EmptyInput);
    }
    let mut per_nga = Vec::new();
    let mut excluded = Vec::new();
    for region in &aligned.regions {
        let first_above = |th: f64| region.points().find(|(_, y)| *y > th).map(|(t, _)| t as i64);
        match (first_above(th1), first_above(th2)) {
            (Some(tau1), Some(tau2)) => {
                per_nga.push(RegionDuration { nga: region.nga().to_string(), tau1, tau2, duration: tau2 - tau1 })
            }
            _ => excluded.push(region.nga().to_string()),
        }
    }
    let d: Vec<f64> = per_nga.iter().map(|r| r.duration as f64).collect();
    let (mean_duration, median_duration) =
        if d.is_empty() { (None, None) } else { (Some(stats::mean(&d)), Some(stats::median(&d))) };
    Ok(EmpiricalDurations { th1, th2, per_nga, excluded, mean_duration, median_duration })
}
