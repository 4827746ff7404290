//! Out-of-sample validation, region bootstrap, plateau thresholds and the
//! growth durations derived from them.

mod bootstrap;
mod continuity;
mod empirical;
mod timescale;
mod validation;

pub use bootstrap::{bootstrap_fits, BootstrapEnsemble};
pub use continuity::{continuity_comparison, ContinuityFit};
pub use empirical::{empirical_durations, EmpiricalDurations, RegionDuration};
pub use timescale::{characteristic_timescale, plateau_thresholds, PlateauThresholds, TimescaleEstimate};
pub use validation::{out_of_sample_validation, ValidationReport};

use thiserror::Error;

use crate::dataset::ContinuityMode;
use crate::logistic::LogisticError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InferenceError {
    #[error("need at least {needed} pooled points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("need at least 2 retained regions, got {0}")]
    TooFewRegions(usize),
    #[error("all {0} fits failed")]
    AllFitsFailed(usize),
    #[error("repeat count must be positive")]
    ZeroRepeats,
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("k_sigma must be positive, got {0}")]
    InvalidKSigma(f64),
    #[error("plateau thresholds are inverted: th1 = {th1} >= th2 = {th2}")]
    InvertedThresholds { th1: f64, th2: f64 },
    #[error("no curve in the ensemble crosses both {th1} and {th2}")]
    NoCrossingCurves { th1: f64, th2: f64 },
    #[error("no retained regions")]
    EmptyInput,
    #[error("{} continuity fit infeasible: {segments} segments with {points} points", mode.name())]
    ContinuityInfeasible { mode: ContinuityMode, segments: usize, points: usize },
    #[error("fit failed: {0}")]
    Fit(#[from] LogisticError),
}
