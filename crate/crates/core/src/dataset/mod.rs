//! Panel data: one century-sampled series of raw complexity scores per
//! region, with continuity labels, plus global min-max scaling.

mod io;
mod synth;

pub use io::{parse_dataset, read_dataset, write_dataset, COLUMNS, SCALED_COLUMN};
pub use synth::{generate_synthetic, SynthSpec};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Sampling interval of every series, in years.
pub const CENTURY: i64 = 100;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("header is missing column `{0}`")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    Row { line: u64, message: String },
    #[error("line {line}: duplicate row for {nga} at year {abs_time}")]
    Duplicate { line: u64, nga: String, abs_time: i64 },
    #[error("{nga}: year {abs_time} is not on the century grid")]
    OffGrid { nga: String, abs_time: i64 },
    #[error("cannot scale: every raw SPC1 value equals {0}")]
    DegenerateScale(f64),
    #[error("invalid scale range [{min}, {max}]")]
    InvalidRange { min: f64, max: f64 },
    #[error("invalid generator parameters: {0}")]
    InvalidParameters(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Continuity label of one century row in one of the two sequence columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SequenceLabel {
    Continuous,
    OutsideCentral,
}

impl SequenceLabel {
    pub fn is_continuous(self) -> bool {
        self == SequenceLabel::Continuous
    }
}

/// Which continuity column defines a central segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContinuityMode {
    Cultural,
    Institutional,
}

impl ContinuityMode {
    pub const ALL: [ContinuityMode; 2] = [ContinuityMode::Cultural, ContinuityMode::Institutional];

    pub fn name(self) -> &'static str {
        match self {
            ContinuityMode::Cultural => "cultural",
            ContinuityMode::Institutional => "institutional",
        }
    }

    /// File spelling of the "continuous" label for this column.
    pub fn continuous_label(self) -> &'static str {
        match self {
            ContinuityMode::Cultural => "cultural.continuity",
            ContinuityMode::Institutional => "institutional.continuity-equivalent",
        }
    }
}

impl std::str::FromStr for ContinuityMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cultural" => Ok(ContinuityMode::Cultural),
            "institutional" => Ok(ContinuityMode::Institutional),
            other => Err(format!("unknown continuity mode `{other}`")),
        }
    }
}

/// One row of the panel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub pol_id: String,
    /// Calendar year, BCE negative.
    pub abs_time: i64,
    /// The RelTime column as found in the file, if any.
    pub rel_time_recorded: Option<i64>,
    pub spc1_raw: f64,
    /// Filled in by [`minmax_scale`].
    pub spc1_scaled: Option<f64>,
    pub culture: SequenceLabel,
    pub institution: SequenceLabel,
}

impl Observation {
    pub fn label(&self, mode: ContinuityMode) -> SequenceLabel {
        match mode {
            ContinuityMode::Cultural => self.culture,
            ContinuityMode::Institutional => self.institution,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSeries {
    pub nga: String,
    /// Ascending by `abs_time`.
    pub points: Vec<Observation>,
}

impl RegionSeries {
    pub fn is_scaled(&self) -> bool {
        self.points.iter().all(|p| p.spc1_scaled.is_some())
    }

    /// Scaled values; `None` if any point is unscaled.
    pub fn scaled_values(&self) -> Option<Vec<f64>> {
        self.points.iter().map(|p| p.spc1_scaled).collect()
    }
}

/// Extrema of the raw scores used by the min-max map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub min: f64,
    pub max: f64,
}

impl ScaleRange {
    pub fn new(min: f64, max: f64) -> Result<Self, DatasetError> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(DatasetError::InvalidRange { min, max });
        }
        Ok(Self { min, max })
    }

    pub fn scale(&self, raw: f64) -> f64 {
        (raw - self.min) / (self.max - self.min)
    }

    pub fn unscale(&self, scaled: f64) -> f64 {
        self.min + scaled * (self.max - self.min)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    /// Sorted by region name.
    pub regions: Vec<RegionSeries>,
    /// Set once the dataset has been scaled.
    pub scale: Option<ScaleRange>,
}

impl Dataset {
    pub fn region(&self, nga: &str) -> Option<&RegionSeries> {
        self.regions.iter().find(|r| r.nga == nga)
    }

    pub fn n_points(&self) -> usize {
        self.regions.iter().map(|r| r.points.len()).sum()
    }

    /// Extrema of the raw scores across every region.
    pub fn raw_extrema(&self) -> Option<(f64, f64)> {
        self.regions.iter().flat_map(|r| r.points.iter().map(|p| p.spc1_raw)).fold(None, |acc, v| match acc {
            None => Some((v, v)),
            Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
        })
    }
}

/// Min-max scale every raw score with the extrema taken over all regions.
pub fn minmax_scale(dataset: Dataset) -> Result<Dataset, DatasetError> {
    let Some((min, max)) = dataset.raw_extrema() else {
        return Err(DatasetError::DegenerateScale(f64::NAN));
    };
    if min == max {
        return Err(DatasetError::DegenerateScale(min));
    }
    scale_with_range(dataset, ScaleRange::new(min, max)?)
}

/// Scale with externally supplied extrema. Values outside the range map
/// outside `[0, 1]`.
pub fn scale_with_range(mut dataset: Dataset, range: ScaleRange) -> Result<Dataset, DatasetError> {
    for p in dataset.regions.iter_mut().flat_map(|r| r.points.iter_mut()) {
        p.spc1_scaled = Some(range.scale(p.spc1_raw));
    }
    dataset.scale = Some(range);
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn obs(abs_time: i64, raw: f64) -> Observation {
        Observation {
            pol_id: "p".into(),
            abs_time,
            rel_time_recorded: None,
            spc1_raw: raw,
            spc1_scaled: None,
            culture: SequenceLabel::OutsideCentral,
            institution: SequenceLabel::OutsideCentral,
        }
    }

    fn dataset(regions: Vec<Vec<f64>>) -> Dataset {
        Dataset {
            regions: regions
                .into_iter()
                .enumerate()
                .map(|(i, vals)| RegionSeries {
                    nga: format!("R{i}"),
                    points: vals.into_iter().enumerate().map(|(k, v)| obs(k as i64 * 100, v)).collect(),
                })
                .collect(),
            scale: None,
        }
    }

    fn scaled(d: &Dataset) -> Vec<f64> {
        d.regions.iter().flat_map(|r| r.scaled_values().unwrap()).collect()
    }

    #[test]
    fn affine_map_over_all_regions() {
        let d = minmax_scale(dataset(vec![vec![2.0, 6.0], vec![4.0]])).unwrap();
        assert_eq!(scaled(&d), vec![0.0, 1.0, 0.5]);
        assert_eq!(d.scale, Some(ScaleRange { min: 2.0, max: 6.0 }));
    }

    #[test]
    fn unit_range_is_unchanged() {
        let d = minmax_scale(dataset(vec![vec![0.0, 0.25, 1.0]])).unwrap();
        assert_eq!(scaled(&d), vec![0.0, 0.25, 1.0]);
    }

    #[test]
    fn constant_scores_do_not_scale() {
        assert!(
            matches!(minmax_scale(dataset(vec![vec![3.0, 3.0]])), Err(DatasetError::DegenerateScale(v)) if v == 3.0)
        );
        assert!(matches!(minmax_scale(Dataset::default()), Err(DatasetError::DegenerateScale(_))));
    }

    #[test]
    fn low_region_stays_low_under_global_scaling() {
        let d = minmax_scale(dataset(vec![vec![0.0, 10.0], vec![1.0, 2.0]])).unwrap();
        let low = d.regions[1].scaled_values().unwrap();
        assert!(low.iter().all(|v| *v <= 0.2));
    }

    proptest! {
        #[test]
        fn scaling_is_monotone_bounded_and_invertible(raw in proptest::collection::vec(-5.0f64..5.0, 2..60)) {
            let lo = raw.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assume!(hi > lo);
            let d = minmax_scale(dataset(vec![raw.clone()])).unwrap();
            let s = scaled(&d);
            let range = d.scale.unwrap();
            prop_assert_eq!(s.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
            prop_assert_eq!(s.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 1.0);
            for i in 0..raw.len() {
                prop_assert!((0.0..=1.0).contains(&s[i]));
                let back = range.unscale(s[i]);
                prop_assert!((back - raw[i]).abs() <= 1e-12 * raw[i].abs().max(hi - lo));
                for j in 0..raw.len() {
                    if raw[i] < raw[j] {
                        prop_assert!(s[i] < s[j]);
                    }
                }
            }
        }
    }
}
