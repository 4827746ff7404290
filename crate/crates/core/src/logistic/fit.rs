//! Levenberg-Marquardt least squares for the logistic curve.

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use super::{rmse, LogisticError, LogisticParams};

const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iter: usize,
    /// Relative decrease of the objective below which an accepted step counts
    /// as converged.
    pub tol: f64,
    /// Relative parameter change that must also be reached, per coordinate
    /// scaled by the Jacobian column norm.
    pub step_tol: f64,
    /// Bound on the largest cosine between the residual vector and a
    /// Jacobian column at a converged point.
    pub gradient_tol: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self { max_iter: 500, tol: 1e-10, step_tol: 1e-10, gradient_tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub params: LogisticParams,
    /// `predicted - observed`, in input order.
    pub residuals: Vec<f64>,
    pub rmse: f64,
    pub n_points: usize,
    pub converged: bool,
    pub iterations: usize,
    /// Largest cosine between residuals and a Jacobian column at the returned
    /// parameters.
    pub gradient_norm: f64,
    /// Sum of squared residuals after every accepted step, starting with the
    /// initial guess.
    pub objective_trace: Vec<f64>,
}

impl FitResult {
    /// The fitted gap collapsed to (numerically) zero, leaving `c` and `d`
    /// unidentified.
    pub fn is_degenerate(&self) -> bool {
        self.params.a.abs() < 1e-8 * self.params.b.abs().max(1.0)
    }
}

/// Least-squares logistic fit with the growth rate locked positive.
///
/// `init.c` must be positive. The returned parameters are canonical.
pub fn fit_logistic(
    points: &[(f64, f64)],
    init: LogisticParams,
    config: &FitConfig,
) -> Result<FitResult, LogisticError> {
    if !(init.c > 0.0) {
        return Err(LogisticError::NonPositiveInitialRate(init.c));
    }
    let mut result = fit_unconstrained(points, init, config)?;
    result.params = result.params.canonical();
    Ok(result)
}

/// Least-squares fit from `init` without canonicalizing the result; the sign
/// of `c` follows wherever the optimizer goes.
pub fn fit_unconstrained(
    points: &[(f64, f64)],
    init: LogisticParams,
    config: &FitConfig,
) -> Result<FitResult, LogisticError> {
    if points.len() < MIN_POINTS {
        return Err(LogisticError::TooFewPoints { needed: MIN_POINTS, got: points.len() });
    }
    let mut params = init;
    let mut cost = objective(points, &params);
    if !cost.is_finite() {
        return Err(LogisticError::NonFinite);
    }
    let zero_cost = 1e-28 * points.iter().map(|(_, y)| y * y).sum::<f64>().max(1.0);
    let mut trace = vec![cost];
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    let mut gnorm = f64::INFINITY;

    while iterations < config.max_iter {
        iterations += 1;
        let (jtj, jtr) = normal_equations(points, &params);
        let diag = jtj.diagonal();
        let max_diag = diag.max();
        if !max_diag.is_finite() || diag.iter().any(|&v| !(v > 1e-30 * max_diag)) {
            return Err(LogisticError::SingularJacobian { iteration: iterations });
        }
        gnorm = gradient_cosine(&diag, &jtr, cost);
        if cost <= zero_cost || gnorm == 0.0 {
            converged = true;
            break;
        }

        let mut accepted = false;
        while lambda < 1e16 {
            let mut damped = jtj;
            for k in 0..4 {
                damped[(k, k)] += lambda * diag[k];
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-jtr));
            let trial = LogisticParams::from_array((Vector4::from(params.to_array()) + step).into());
            let trial_cost = objective(points, &trial);
            if trial_cost.is_finite() && trial_cost < cost {
                let decrease = (cost - trial_cost) / cost;
                let step_size = (0..4).map(|k| (step[k] * diag[k].sqrt()).abs()).fold(0.0, f64::max);
                let param_size = (0..4).map(|k| (trial.to_array()[k] * diag[k].sqrt()).abs()).fold(0.0, f64::max);
                params = trial;
                cost = trial_cost;
                trace.push(cost);
                lambda = (lambda / 10.0).max(1e-12);
                accepted = true;
                if decrease <= config.tol && step_size <= config.step_tol * (param_size + config.step_tol) {
                    let (jtj, jtr) = normal_equations(points, &params);
                    gnorm = gradient_cosine(&jtj.diagonal(), &jtr, cost);
                    converged = gnorm <= config.gradient_tol || cost <= zero_cost;
                }
                break;
            }
            lambda *= 10.0;
        }
        if converged {
            break;
        }
        if !accepted {
            // no descent direction left at working precision
            let (jtj, jtr) = normal_equations(points, &params);
            gnorm = gradient_cosine(&jtj.diagonal(), &jtr, cost);
            converged = gnorm <= config.gradient_tol || cost <= zero_cost;
            break;
        }
    }

    let residuals: Vec<f64> = points.iter().map(|&(t, y)| params.eval(t) - y).collect();
    Ok(FitResult {
        params,
        rmse: rmse(&residuals),
        residuals,
        n_points: points.len(),
        converged,
        iterations,
        gradient_norm: gnorm,
        objective_trace: trace,
    })
}

fn objective(points: &[(f64, f64)], p: &LogisticParams) -> f64 {
    points.iter().map(|&(t, y)| (p.eval(t) - y).powi(2)).sum()
}

fn normal_equations(points: &[(f64, f64)], p: &LogisticParams) -> (Matrix4<f64>, Vector4<f64>) {
    let mut jtj = Matrix4::zeros();
    let mut jtr = Vector4::zeros();
    for &(t, y) in points {
        let g = Vector4::from(p.gradient(t));
        let r = p.eval(t) - y;
        jtj += g * g.transpose();
        jtr += g * r;
    }
    (jtj, jtr)
}

fn gradient_cosine(diag: &Vector4<f64>, jtr: &Vector4<f64>, cost: f64) -> f64 {
    if cost == 0.0 {
        return 0.0;
    }
    (0..4).map(|k| jtr[k].abs() / (diag[k] * cost).sqrt()).fold(0.0, f64::max)
}
