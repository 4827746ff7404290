//! Checking new regional series against a fitted curve.

use serde::{Deserialize, Serialize};

use crate::align::anchor_time;
use crate::dataset::{scale_with_range, Dataset};
use crate::pipeline::{PipelineError, ReportBundle};

/// A point is divergent when its residual exceeds this many RMSEs of the
/// full fit.
pub const DIVERGENCE_RMSE_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckedPoint {
    pub abs_time: i64,
    pub rel_time: i64,
    pub observed: f64,
    pub predicted: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CheckOutcome {
    Anchored {
        anchor_year: i64,
        points: Vec<CheckedPoint>,
        /// Fraction of points with `|residual| > 2 * rmse`.
        divergent_fraction: f64,
    },
    /// The series never rises above the threshold.
    NotAnchorable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub nga: String,
    pub outcome: CheckOutcome,
}

/// Scale `new_series` with the bundle's stored extrema, anchor each region
/// at the bundle's threshold and compare it with the full-data curve.
pub fn benchmark_check(bundle: &ReportBundle, new_series: Dataset) -> Result<Vec<DivergenceReport>, PipelineError> {
    let scaled = scale_with_range(new_series, bundle.scale)?;
    let limit = DIVERGENCE_RMSE_FACTOR * bundle.full_fit.rmse;
    let curve = bundle.full_fit.params;
    let mut reports = Vec::new();
    for series in &scaled.regions {
        let anchor = anchor_time(series, bundle.threshold.spc1_0)?;
        let outcome = match anchor.anchor_year {
            None => CheckOutcome::NotAnchorable,
            Some(anchor_year) => {
                let points: Vec<CheckedPoint> = series
                    .points
                    .iter()
                    .map(|p| {
                        let rel_time = p.abs_time - anchor_year;
                        let observed = p.spc1_scaled.unwrap_or(f64::NAN);
                        let predicted = curve.eval(rel_time as f64);
                        CheckedPoint {
                            abs_time: p.abs_time,
                            rel_time,
                            observed,
                            predicted,
                            residual: predicted - observed,
                        }
                    })
                    .collect();
                let n_div = points.iter().filter(|p| p.residual.abs() > limit).count();
                CheckOutcome::Anchored { anchor_year, divergent_fraction: n_div as f64 / points.len() as f64, points }
            }
        };
        reports.push(DivergenceReport { nga: series.nga.clone(), outcome });
    }
    Ok(reports)
}

/// Fraction of a retained region's in-sample residuals beyond the
/// divergence limit.
pub fn in_sample_divergence(bundle: &ReportBundle, nga: &str) -> Option<f64> {
    let limit = DIVERGENCE_RMSE_FACTOR * bundle.full_fit.rmse;
    let mut offset = 0;
    for r in &bundle.aligned.regions {
        let n = r.rel_times.len();
        if r.nga() == nga {
            let res = &bundle.full_fit.residuals[offset..offset + n];
            return Some(res.iter().filter(|v| v.abs() > limit).count() as f64 / n as f64);
        }
        offset += n;
    }
    None
}

pub fn render_check(reports: &[DivergenceReport]) -> String {
    use std::fmt::Write;
    let mut out = String::from("# benchmark check\n");
    for r in reports {
        let _ = writeln!(out, "\n[{}]", r.nga);
        match &r.outcome {
            CheckOutcome::NotAnchorable => {
                let _ = writeln!(out, "status = not_anchorable");
            }
            CheckOutcome::Anchored { anchor_year, points, divergent_fraction } => {
                let _ = writeln!(out, "status = anchored");
                let _ = writeln!(out, "anchor_year = {anchor_year}");
                let _ = writeln!(out, "points = {}", points.len());
                let _ = writeln!(out, "divergent_fraction = {divergent_fraction}");
                let _ = writeln!(out, "# columns: abs_time | rel_time | observed | predicted | residual");
                for p in points {
                    let _ = writeln!(
                        out,
                        "point | {} | {} | {} | {} | {}",
                        p.abs_time, p.rel_time, p.observed, p.predicted, p.residual
                    );
                }
            }
        }
    }
    out
}
