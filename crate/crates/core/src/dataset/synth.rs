//! Synthetic panels drawn from a known logistic curve.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{Dataset, DatasetError, Observation, RegionSeries, SequenceLabel, CENTURY};
use crate::logistic::LogisticParams;
use crate::rng::{substream, Stream};

/// Generator parameters.
///
/// Region `i` is sampled on the relative-time grid `k * 100` for `k` in
/// `spans[i % spans.len()]` (inclusive, in centuries) and placed in calendar
/// time by adding `anchor_offsets[i % anchor_offsets.len()]`. Raw scores are
/// `params.eval(t) + N(0, noise_sigma^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n_regions: usize,
    pub params: LogisticParams,
    pub noise_sigma: f64,
    /// Calendar year of relative time zero, per region (cycled).
    pub anchor_offsets: Vec<i64>,
    /// First and last century index, per region (cycled).
    pub spans: Vec<(i64, i64)>,
    /// Points within this many centuries of relative time zero are labelled
    /// culturally continuous.
    pub cultural_half_width: i64,
    /// Same for the institutional column.
    pub institutional_half_width: i64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            n_regions: 23,
            params: LogisticParams::new(1.0, 0.0, 0.002, 0.0),
            noise_sigma: 0.05,
            anchor_offsets: vec![-3000, -2200, -1500, -800, -300, 200, 900],
            spans: vec![(-30, 30)],
            cultural_half_width: 6,
            institutional_half_width: 3,
        }
    }
}

impl SynthSpec {
    /// A 35-region panel in which the last 12 regions are only observed on
    /// the low plateau and never cross the density threshold.
    pub fn demo() -> Self {
        let high = [(-30, 25), (-25, 30), (-35, 20), (-20, 28), (-28, 35)];
        let low = [(-40, -30), (-36, -30), (-33, -28)];
        let spans = (0..35).map(|i| if i < 23 { high[i % high.len()] } else { low[i % low.len()] }).collect();
        Self { n_regions: 35, noise_sigma: 0.04, spans, ..Self::default() }
    }

    fn validate(&self) -> Result<(), DatasetError> {
        let bad = |m: &str| Err(DatasetError::InvalidParameters(m.into()));
        if self.n_regions == 0 {
            return bad("region count must be positive");
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad("noise sigma must be finite and non-negative");
        }
        if self.spans.is_empty() || self.spans.iter().any(|(lo, hi)| lo > hi) {
            return bad("spans must be non-empty with first <= last");
        }
        if self.anchor_offsets.iter().any(|o| o % CENTURY != 0) {
            return bad("anchor offsets must be whole centuries");
        }
        Ok(())
    }
}

pub fn generate_synthetic(spec: &SynthSpec, seed: u64) -> Result<Dataset, DatasetError> {
    spec.validate()?;
    let noise = Normal::new(0.0, spec.noise_sigma).map_err(|e| DatasetError::InvalidParameters(e.to_string()))?;
    let width = (spec.n_regions - 1).to_string().len().max(2);
    let label = |k: i64, half: i64| {
        if k.abs() <= half {
            SequenceLabel::Continuous
        } else {
            SequenceLabel::OutsideCentral
        }
    };

    let mut regions: Vec<RegionSeries> = (0..spec.n_regions)
        .map(|i| {
            let mut rng = substream(seed, Stream::Synthetic, i as u64);
            let (first, last) = spec.spans[i % spec.spans.len()];
            let offset =
                if spec.anchor_offsets.is_empty() { 0 } else { spec.anchor_offsets[i % spec.anchor_offsets.len()] };
            let nga = format!("Region {i:0width$}");
            let points = (first..=last)
                .map(|k| {
                    let rel = k * CENTURY;
                    let eps = if spec.noise_sigma > 0.0 { noise.sample(&mut rng) } else { 0.0 };
                    Observation {
                        pol_id: format!("R{i:0width$}P{:02}", (k - first) / 5),
                        abs_time: rel + offset,
                        rel_time_recorded: Some(rel),
                        spc1_raw: spec.params.eval(rel as f64) + eps,
                        spc1_scaled: None,
                        culture: label(k, spec.cultural_half_width),
                        institution: label(k, spec.institutional_half_width),
                    }
                })
                .collect();
            RegionSeries { nga, points }
        })
        .collect();
    regions.sort_by(|a, b| a.nga.cmp(&b.nga));
    Ok(Dataset { regions, scale: None })
}
