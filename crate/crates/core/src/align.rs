//! Anchoring regions at their threshold crossing and extracting the
//! continuous central segments around it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{ContinuityMode, Dataset, RegionSeries, ScaleRange};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlignError {
    #[error("{0}: series has not been scaled")]
    Unscaled(String),
    #[error("threshold {0} is outside (0, 1)")]
    InvalidThreshold(f64),
    #[error("{nga}: the relative-time-zero point is outside the {} sequence", mode.name())]
    NoCentralSegment { nga: String, mode: ContinuityMode },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorResult {
    pub nga: String,
    /// First year whose scaled score is strictly above the threshold.
    pub anchor_year: Option<i64>,
    /// Years, before the anchor, whose score equals the threshold exactly.
    pub ties: Vec<i64>,
}

impl AnchorResult {
    pub fn crossed(&self) -> bool {
        self.anchor_year.is_some()
    }
}

pub fn anchor_time(series: &RegionSeries, threshold: f64) -> Result<AnchorResult, AlignError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(AlignError::InvalidThreshold(threshold));
    }
    let values = series.scaled_values().ok_or_else(|| AlignError::Unscaled(series.nga.clone()))?;
    let mut ties = Vec::new();
    let mut anchor_year = None;
    for (p, v) in series.points.iter().zip(values) {
        if v > threshold {
            anchor_year = Some(p.abs_time);
            break;
        }
        if v == threshold {
            ties.push(p.abs_time);
        }
    }
    Ok(AnchorResult { nga: series.nga.clone(), anchor_year, ties })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedRegion {
    pub series: RegionSeries,
    pub anchor_year: i64,
    /// `abs_time - anchor_year`, one per point.
    pub rel_times: Vec<i64>,
}

impl AlignedRegion {
    pub fn nga(&self) -> &str {
        &self.series.nga
    }

    /// `(relative time, scaled score)` pairs in time order.
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.rel_times.iter().zip(&self.series.points).map(|(t, p)| (*t as f64, p.spc1_scaled.unwrap_or(f64::NAN)))
    }

    pub fn anchor_index(&self) -> usize {
        self.rel_times.iter().position(|t| *t == 0).expect("aligned region has a zero point")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedDataset {
    /// Retained regions, sorted by name.
    pub regions: Vec<AlignedRegion>,
    pub threshold: f64,
    /// Regions that never cross the threshold.
    pub discarded: Vec<String>,
    /// `(region, year)` pairs where a score sits exactly on the threshold.
    pub ties: Vec<(String, i64)>,
    pub scale: Option<ScaleRange>,
}

impl AlignedDataset {
    pub fn pooled_points(&self) -> Vec<(f64, f64)> {
        self.regions.iter().flat_map(|r| r.points()).collect()
    }

    pub fn region(&self, nga: &str) -> Option<&AlignedRegion> {
        self.regions.iter().find(|r| r.nga() == nga)
    }

    pub fn anchors(&self) -> Vec<(String, i64)> {
        self.regions.iter().map(|r| (r.nga().to_string(), r.anchor_year)).collect()
    }
}

pub fn shift_to_reltime(dataset: &Dataset, threshold: f64) -> Result<AlignedDataset, AlignError> {
    let mut regions = Vec::new();
    let mut discarded = Vec::new();
    let mut ties = Vec::new();
    for series in &dataset.regions {
        let anchor = anchor_time(series, threshold)?;
        ties.extend(anchor.ties.iter().map(|y| (series.nga.clone(), *y)));
        match anchor.anchor_year {
            Some(year) => regions.push(AlignedRegion {
                rel_times: series.points.iter().map(|p| p.abs_time - year).collect(),
                series: series.clone(),
                anchor_year: year,
            }),
            None => discarded.push(series.nga.clone()),
        }
    }
    regions.sort_by(|a, b| a.series.nga.cmp(&b.series.nga));
    discarded.sort();
    Ok(AlignedDataset { regions, threshold, discarded, ties, scale: dataset.scale })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentPoint {
    pub abs_time: i64,
    pub rel_time: i64,
    pub spc1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentralSegment {
    pub nga: String,
    pub mode: ContinuityMode,
    pub points: Vec<SegmentPoint>,
}

impl CentralSegment {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Longest run of consecutive rows labelled continuous in `mode` that
/// contains the relative-time-zero row.
pub fn extract_central_sequence(region: &AlignedRegion, mode: ContinuityMode) -> Result<CentralSegment, AlignError> {
    let pts = &region.series.points;
    let zero = region.anchor_index();
    let continuous = |i: usize| pts[i].label(mode).is_continuous();
    if !continuous(zero) {
        return Err(AlignError::NoCentralSegment { nga: region.nga().to_string(), mode });
    }
    let mut start = zero;
    while start > 0 && continuous(start - 1) {
        start -= 1;
    }
    let mut end = zero;
    while end + 1 < pts.len() && continuous(end + 1) {
        end += 1;
    }
    let points = (start..=end)
        .map(|i| SegmentPoint {
            abs_time: pts[i].abs_time,
            rel_time: region.rel_times[i],
            spc1: pts[i].spc1_scaled.unwrap_or(f64::NAN),
        })
        .collect();
    Ok(CentralSegment { nga: region.nga().to_string(), mode, points })
}
