//! Likelihoods of the q-normal linear model, restricted MLE, information
//! criteria and cross-validation along a solution path.

mod criteria;
mod cv;
mod likelihood;
mod mle;

pub use criteria::{
    criterion_value, penalized_deviance, select_model, select_model_cached, CriterionKind, MleCache, Selection,
};
pub use cv::{cross_validate, cross_validate_on_grid, fold_assignment, CvResult, DEFAULT_FOLDS};
pub use likelihood::{
    log_likelihood, lq_constant, lq_likelihood, lq_likelihood_closed_form, lq_rss_coefficient,
};
pub use mle::{mle_restricted, mlqe, FitSource, ModelFit, IRLS_MAX_ITER, IRLS_RESTARTS, IRLS_TOL};

use crate::linalg::LinalgError;
use crate::solver::SolverError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InferenceError {
    #[error("no path point has an available criterion value")]
    NoSelection,
    #[error("cross-validation is not an information criterion; use cross_validate")]
    CvNotACriterion,
    #[error("unknown criterion '{0}'")]
    UnknownCriterion(String),
    #[error("restricted MLE did not converge within {iterations} iterations")]
    MleNotConverged { iterations: usize },
    #[error("IRLS decreased the log-likelihood at iteration {iteration}: {before} -> {after}")]
    IrlsAscent { iteration: usize, before: f64, after: f64 },
    #[error("support index {0} is out of range or not strictly increasing")]
    InvalidSupport(usize),
    #[error("cannot use {folds} folds with {n} observations")]
    InvalidFolds { folds: usize, n: usize },
    #[error("every cross-validation fold was degenerate")]
    AllFoldsDegenerate,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}
