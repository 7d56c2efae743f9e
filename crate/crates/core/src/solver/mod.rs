//! Penalized least squares (LASSO, SCAD, MCP) by coordinate descent over
//! warm-started lambda paths.

mod descent;
mod design;
mod path;
mod penalty;

use nalgebra::DVector;

use crate::linalg::LinalgError;

pub use descent::{coordinate_descent, objective, CdState, ConvergenceReport};
pub use design::{predict, standardize, Design, Standardization};
pub use path::{lambda_grid, lambda_max, solve_on_grid, solve_path, PathConfig, SolutionPath};
pub use penalty::{
    penalty_value, scalar_update, scalar_update_weighted, soft_threshold, PenaltyKind, PenaltySpec,
    DEFAULT_MCP_GAMMA, DEFAULT_SCAD_A,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("predictor column {column} has zero variance")]
    ZeroVariance { column: usize },
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("need at least 2 observations, got {0}")]
    TooFewRows(usize),
    #[error("design has no predictors")]
    NoPredictors,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid penalty: {0}")]
    InvalidPenalty(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Regression coefficients `(theta_0, theta_1, ..., theta_d)` on the
/// standardized scale, with the support cached.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Coefficients {
    theta: DVector<f64>,
    support: Vec<usize>,
}

impl Coefficients {
    pub fn new(theta: DVector<f64>) -> Self {
        assert!(!theta.is_empty(), "coefficient vector needs an intercept");
        let support = (1..theta.len()).filter(|&i| theta[i] != 0.0).collect();
        Coefficients { theta, support }
    }

    pub fn zeros(d: usize) -> Self {
        Coefficients::new(DVector::zeros(d + 1))
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn intercept(&self) -> f64 {
        self.theta[0]
    }

    pub fn slopes(&self) -> &[f64] {
        &self.theta.as_slice()[1..]
    }

    /// Indices `i >= 1` with `theta_i != 0`, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn d(&self) -> usize {
        self.theta.len() - 1
    }
}
