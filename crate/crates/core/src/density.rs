//! Gaussian kernel density estimation and the two-mode threshold.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Default number of grid points.
pub const DEFAULT_GRID_SIZE: usize = 1024;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DensityError {
    #[error("need at least 2 samples, got {0}")]
    InsufficientData(usize),
    #[error("sample contains a non-finite value")]
    NonFinite,
    #[error("samples have zero variance; Scott bandwidth is undefined")]
    DegenerateBandwidth,
    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),
    #[error("grid needs at least {needed} points, got {got}")]
    GridTooSmall { needed: usize, got: usize },
    #[error("density has {0} local maxima; the threshold needs two")]
    Unimodal(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub enum Bandwidth {
    /// `h = sd * n^(-1/5)`, sample standard deviation with `n - 1`.
    #[default]
    Scott,
    Fixed(f64),
}

impl std::str::FromStr for Bandwidth {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") || s.eq_ignore_ascii_case("scott") {
            return Ok(Bandwidth::Scott);
        }
        match s.parse::<f64>() {
            Ok(h) if h > 0.0 && h.is_finite() => Ok(Bandwidth::Fixed(h)),
            _ => Err(format!("bandwidth must be `auto` or a positive number, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KdeOptions {
    pub bandwidth: Bandwidth,
    pub grid_size: usize,
    /// Restrict the grid to this interval.
    pub clip: Option<(f64, f64)>,
}

impl Default for KdeOptions {
    fn default() -> Self {
        Self { bandwidth: Bandwidth::Scott, grid_size: DEFAULT_GRID_SIZE, clip: None }
    }
}

/// A Gaussian kernel density estimator over one-dimensional samples.
#[derive(Debug, Clone)]
pub struct GaussianKde {
    samples: Vec<f64>,
    bandwidth: f64,
}

impl GaussianKde {
    pub fn new(samples: &[f64], bandwidth: Bandwidth) -> Result<Self, DensityError> {
        if samples.len() < 2 {
            return Err(DensityError::InsufficientData(samples.len()));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(DensityError::NonFinite);
        }
        let h = match bandwidth {
            Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => h,
            Bandwidth::Fixed(h) => return Err(DensityError::InvalidBandwidth(h)),
            Bandwidth::Scott => {
                let sd = crate::stats::std_dev(samples, 1);
                if !(sd > 0.0) {
                    return Err(DensityError::DegenerateBandwidth);
                }
                sd * (samples.len() as f64).powf(-0.2)
            }
        };
        Ok(Self { samples: samples.to_vec(), bandwidth: h })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let sum: f64 = self
            .samples
            .iter()
            .map(|xi| {
                let u = (x - xi) / h;
                (-0.5 * u * u).exp()
            })
            .sum();
        sum * INV_SQRT_2PI / (self.samples.len() as f64 * h)
    }

    /// Evaluate on `grid_size` evenly spaced points covering the samples
    /// plus four bandwidths on either side, optionally clipped.
    pub fn on_grid(&self, grid_size: usize, clip: Option<(f64, f64)>) -> Result<DensityEstimate, DensityError> {
        if grid_size < 2 {
            return Err(DensityError::GridTooSmall { needed: 2, got: grid_size });
        }
        let (lo, hi) = self.samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), &x| (l.min(x), u.max(x)));
        let mut start = lo - 4.0 * self.bandwidth;
        let mut end = hi + 4.0 * self.bandwidth;
        if let Some((cl, cu)) = clip {
            start = start.max(cl);
            end = end.min(cu);
        }
        let step = (end - start) / (grid_size - 1) as f64;
        let grid: Vec<f64> = (0..grid_size).map(|i| start + i as f64 * step).collect();
        let density = grid.par_iter().map(|&x| self.evaluate(x)).collect();
        Ok(DensityEstimate { grid, density, bandwidth: self.bandwidth, n_samples: self.samples.len() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
    pub bandwidth: f64,
    pub n_samples: usize,
}

impl DensityEstimate {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.grid.windows(2).zip(self.density.windows(2)).map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1])).sum()
    }
}

pub fn gaussian_kde(samples: &[f64], bandwidth: Bandwidth, grid_size: usize) -> Result<DensityEstimate, DensityError> {
    gaussian_kde_with(samples, &KdeOptions { bandwidth, grid_size, clip: None })
}

pub fn gaussian_kde_with(samples: &[f64], options: &KdeOptions) -> Result<DensityEstimate, DensityError> {
    GaussianKde::new(samples, options.bandwidth)?.on_grid(options.grid_size, options.clip)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BimodalThreshold {
    pub spc1_0: f64,
    pub left_peak: f64,
    pub right_peak: f64,
    /// Density at the left and right peak.
    pub peak_densities: (f64, f64),
    pub threshold_density: f64,
}

/// Indices of strict local maxima. A run of equal values counts once, at its
/// midpoint, when it is higher than the points on both sides of the run.
pub fn local_maxima(values: &[f64]) -> Vec<usize> {
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < values.len() {
        let mut j = i;
        while j + 1 < values.len() && values[j + 1] == values[i] {
            j += 1;
        }
        if j + 1 < values.len() && values[i] > values[i - 1] && values[j] > values[j + 1] {
            peaks.push((i + j) / 2);
        }
        i = j + 1;
    }
    peaks
}

/// Lowest grid point strictly between the two highest local maxima.
pub fn find_bimodal_threshold(estimate: &DensityEstimate) -> Result<BimodalThreshold, DensityError> {
    let y = &estimate.density;
    if y.len() < 3 {
        return Err(DensityError::GridTooSmall { needed: 3, got: y.len() });
    }
    let mut peaks = local_maxima(y);
    if peaks.len() < 2 {
        return Err(DensityError::Unimodal(peaks.len()));
    }
    // highest first; equal heights keep grid order
    peaks.sort_by(|&a, &b| y[b].total_cmp(&y[a]).then(a.cmp(&b)));
    let (left, right) = (peaks[0].min(peaks[1]), peaks[0].max(peaks[1]));
    let mut best = left + 1;
    for k in left + 1..right {
        if y[k] < y[best] {
            best = k;
        }
    }
    Ok(BimodalThreshold {
        spc1_0: estimate.grid[best],
        left_peak: estimate.grid[left],
        right_peak: estimate.grid[right],
        peak_densities: (y[left], y[right]),
        threshold_density: y[best],
    })
}
