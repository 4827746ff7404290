//! Four-parameter logistic curve `f(t) = a / (1 + exp(-c (t - d))) + b`.
//!
//! `b` is the lower asymptote, `a + b` the upper one, `c` the growth rate per
//! year and `d` the midpoint in relative-time years. The same curve can also
//! be written with `(-a, a + b, -c, d)`; [`LogisticParams::canonical`] maps
//! either form onto the one with `c > 0`.

mod fit;

pub use fit::{fit_logistic, fit_unconstrained, FitConfig, FitResult};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest magnitude fed to `exp`.
pub const EXP_CLAMP: f64 = 700.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogisticError {
    #[error("value {y} never reached: curve stays within ({lower}, {upper})")]
    NoCrossing { y: f64, lower: f64, upper: f64 },
    #[error("growth rate is zero; the curve is constant")]
    ZeroRate,
    #[error("need at least {needed} points to fit, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("initial growth rate must be positive, got {0}")]
    NonPositiveInitialRate(f64),
    #[error("jacobian is singular at iteration {iteration}")]
    SingularJacobian { iteration: usize },
    #[error("non-finite value encountered during fit")]
    NonFinite,
    #[error("metric undefined: {0}")]
    UndefinedMetric(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    /// Gap between the plateaus.
    pub a: f64,
    /// Lower asymptote.
    pub b: f64,
    /// Rate per year.
    pub c: f64,
    /// Midpoint in relative-time years.
    pub d: f64,
}

impl LogisticParams {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    /// Starting point used for the full-data fit of scaled, anchored data.
    pub const fn default_init() -> Self {
        Self::new(1.0, 0.0, 0.002, 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.a * self.sigmoid(t) + self.b
    }

    fn sigmoid(&self, t: f64) -> f64 {
        let z = (-self.c * (t - self.d)).clamp(-EXP_CLAMP, EXP_CLAMP);
        1.0 / (1.0 + z.exp())
    }

    /// Partial derivatives of `f(t)` with respect to `(a, b, c, d)`.
    pub fn gradient(&self, t: f64) -> [f64; 4] {
        let s = self.sigmoid(t);
        let ds = s * (1.0 - s);
        [s, 1.0, self.a * ds * (t - self.d), -self.a * ds * self.c]
    }

    /// The same curve written with the opposite sign of `c`.
    pub fn mirrored(&self) -> Self {
        Self::new(-self.a, self.a + self.b, -self.c, self.d)
    }

    /// The representation with `c >= 0`.
    pub fn canonical(&self) -> Self {
        if self.c < 0.0 {
            self.mirrored()
        } else {
            *self
        }
    }

    pub fn lower_asymptote(&self) -> f64 {
        self.canonical().b
    }

    pub fn upper_asymptote(&self) -> f64 {
        let p = self.canonical();
        p.a + p.b
    }

    /// Time at which the curve takes the value `y`.
    pub fn inverse(&self, y: f64) -> Result<f64, LogisticError> {
        if self.c == 0.0 {
            return Err(LogisticError::ZeroRate);
        }
        let (lo, hi) = if self.a > 0.0 { (self.b, self.a + self.b) } else { (self.a + self.b, self.b) };
        if !(y > lo && y < hi) {
            return Err(LogisticError::NoCrossing { y, lower: lo, upper: hi });
        }
        Ok(self.d - (self.a / (y - self.b) - 1.0).ln() / self.c)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn from_array(p: [f64; 4]) -> Self {
        Self::new(p[0], p[1], p[2], p[3])
    }
}

/// Free-function form of [`LogisticParams::eval`].
pub fn logistic_eval(params: &LogisticParams, t: f64) -> f64 {
    params.eval(t)
}

/// Free-function form of [`LogisticParams::inverse`].
pub fn logistic_inverse(params: &LogisticParams, y: f64) -> Result<f64, LogisticError> {
    params.inverse(y)
}

pub fn rmse(residuals: &[f64]) -> f64 {
    (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt()
}

/// `1 - SSE / SST`, with the baseline being the mean of `actual`.
pub fn coefficient_of_prediction(predicted: &[f64], actual: &[f64]) -> Result<f64, LogisticError> {
    if predicted.len() != actual.len() {
        return Err(LogisticError::UndefinedMetric("length mismatch"));
    }
    if actual.is_empty() {
        return Err(LogisticError::UndefinedMetric("empty input"));
    }
    let mean = actual.iter().sum::<f64>() / actual.len() as f64;
    let sst: f64 = actual.iter().map(|y| (mean - y).powi(2)).sum();
    if sst == 0.0 {
        return Err(LogisticError::UndefinedMetric("actual values have zero variance"));
    }
    let sse: f64 = predicted.iter().zip(actual).map(|(p, y)| (p - y).powi(2)).sum();
    Ok(1.0 - sse / sst)
}
