//! Relative-time alignment, logistic growth fitting and bootstrap timescale
//! estimation for century-sampled regional social-complexity series.
//!
//! The pipeline runs in a fixed order:
//!
//! 1. [`dataset`] parses the panel CSV and min-max scales the raw scores
//!    over every region at once.
//! 2. [`density`] estimates the pooled score density with a Gaussian kernel
//!    and locates the minimum between its two modes (the threshold).
//! 3. [`align`] anchors every region at its first century above the
//!    threshold and shifts it into relative time; regions that never cross
//!    are discarded.
//! 4. [`logistic`] fits one four-parameter logistic curve to the pooled
//!    relative-time data.
//! 5. [`inference`] validates the fit out of sample, bootstraps over regions,
//!    and turns the ensemble into plateau thresholds and a characteristic
//!    growth duration.
//!
//! [`pipeline`] wires the stages together; [`report`], [`plots`] and
//! [`benchmark`] consume the resulting [`pipeline::ReportBundle`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod align;
pub mod benchmark;
pub mod dataset;
pub mod density;
pub mod inference;
pub mod logistic;
pub mod pipeline;
pub mod plots;
pub mod report;
pub mod rng;
mod stats;
mod svg;

pub use align::{AlignedDataset, AlignedRegion, AnchorResult, CentralSegment};
pub use dataset::{ContinuityMode, Dataset, Observation, RegionSeries, SequenceLabel};
pub use density::{Bandwidth, BimodalThreshold, DensityEstimate};
pub use logistic::{FitConfig, FitResult, LogisticParams};
pub use pipeline::{PipelineConfig, PipelineError, ReportBundle, Stage};
