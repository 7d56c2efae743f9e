use super::descent::{coordinate_descent, ConvergenceReport};
use super::{Coefficients, Design, PenaltySpec, SolverError};

/// Settings for the lambda grid and the inner coordinate-descent loop.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PathConfig {
    pub n_lambda: usize,
    /// Smallest grid value as a fraction of `lambda_max`. `None` picks
    /// 0.001 when `n > d` and 0.05 otherwise.
    pub lambda_min_ratio: Option<f64>,
    /// Convergence threshold on the largest absolute coefficient change per sweep.
    pub tol: f64,
    /// Maximum sweeps per lambda.
    pub max_iter: usize,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig { n_lambda: 100, lambda_min_ratio: None, tol: 1e-7, max_iter: 10_000 }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        if self.n_lambda == 0 {
            return Err(SolverError::InvalidConfig("n_lambda must be positive".into()));
        }
        if let Some(r) = self.lambda_min_ratio {
            if !(r > 0.0 && r < 1.0) {
                return Err(SolverError::InvalidConfig(format!("lambda_min_ratio must lie in (0, 1), got {r}")));
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SolverError::InvalidConfig(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(SolverError::InvalidConfig("max_iter must be positive".into()));
        }
        Ok(())
    }

    pub fn min_ratio_for(&self, n: usize, d: usize) -> f64 {
        self.lambda_min_ratio.unwrap_or(if n > d { 0.001 } else { 0.05 })
    }
}

/// Penalized solutions over a decreasing lambda grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolutionPath {
    pub lambdas: Vec<f64>,
    pub coefs: Vec<Coefficients>,
    pub reports: Vec<ConvergenceReport>,
}

impl SolutionPath {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    pub fn all_converged(&self) -> bool {
        self.reports.iter().all(|r| r.converged)
    }
}

/// Smallest lambda whose solution has no nonzero slope: `max_i |<x_i, y - ybar>| / n`.
pub fn lambda_max(design: &Design) -> f64 {
    let n = design.n();
    let y = design.y();
    let ybar = y.sum() / n as f64;
    (1..=design.d())
        .map(|j| {
            design.column(j).iter().zip(y.iter()).map(|(x, yv)| x * (yv - ybar)).sum::<f64>().abs()
        })
        .fold(0.0, f64::max)
        / n as f64
}

/// Geometric grid from `lambda_max` down to `lambda_max * ratio`. Collapses to
/// the single point `0` when `lambda_max` is zero.
pub fn lambda_grid(lambda_max: f64, n_lambda: usize, min_ratio: f64) -> Vec<f64> {
    if !(lambda_max > 0.0) {
        return vec![0.0];
    }
    if n_lambda == 1 {
        return vec![lambda_max];
    }
    let log_hi = lambda_max.ln();
    let log_lo = (lambda_max * min_ratio).ln();
    let step = (log_hi - log_lo) / (n_lambda - 1) as f64;
    (0..n_lambda)
        .map(|k| if k == 0 { lambda_max } else { (log_hi - step * k as f64).exp() })
        .collect()
}

/// Solves the penalized problem along the default grid for `design`, warm
/// starting each lambda from the previous solution.
pub fn solve_path(design: &Design, spec: &PenaltySpec, config: &PathConfig) -> Result<SolutionPath, SolverError> {
    config.validate()?;
    let grid = lambda_grid(lambda_max(design), config.n_lambda, config.min_ratio_for(design.n(), design.d()));
    solve_on_grid(design, spec, &grid, config)
}

/// Warm-started solves on a caller-supplied decreasing grid. Any lambda at or
/// above `lambda_max` gets the intercept-only model.
pub fn solve_on_grid(
    design: &Design,
    spec: &PenaltySpec,
    lambdas: &[f64],
    config: &PathConfig,
) -> Result<SolutionPath, SolverError> {
    config.validate()?;
    if lambdas.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(SolverError::InvalidConfig("lambda grid must be strictly decreasing".into()));
    }
    let mut current = Coefficients::zeros(design.d());
    let mut path = SolutionPath {
        lambdas: lambdas.to_vec(),
        coefs: Vec::with_capacity(lambdas.len()),
        reports: Vec::with_capacity(lambdas.len()),
    };
    let lmax = lambda_max(design);
    for &lambda in lambdas {
        if lambda >= lmax {
            let mut theta = nalgebra::DVector::zeros(design.d() + 1);
            theta[0] = design.y().mean();
            let null = Coefficients::new(theta);
            current = null.clone();
            path.coefs.push(null);
            path.reports.push(ConvergenceReport { iterations: 0, converged: true });
            continue;
        }
        let (coefs, report) = coordinate_descent(design, spec, lambda, &current, config)?;
        if !report.converged {
            log::debug!("coordinate descent hit max_iter at lambda = {lambda}");
        }
        current = coefs.clone();
        path.coefs.push(coefs);
        path.reports.push(report);
    }
    Ok(path)
}
