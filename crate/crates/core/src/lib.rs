//! Sparse linear regression with heavy-tailed q-normal errors.
//!
//! Maximizing the L_q-likelihood of a q-normal linear model with known
//! dispersion is equivalent to least squares, so LASSO, SCAD and MCP applied
//! to such data are L_q-likelihood regularization methods. This crate
//! provides:
//!
//! - [`qcore`]: q-logarithm, q-exponential and the q-normal distribution.
//! - [`solver`]: coordinate-descent paths for the three penalties.
//! - [`inference`]: likelihoods, restricted MLE, information criteria and
//!   cross-validation along a path.
//! - [`simlab`]: the Monte-Carlo harness for model selection and
//!   generalization experiments.

pub mod inference;
pub mod linalg;
pub mod qcore;
pub mod quadrature;
pub mod simlab;
pub mod solver;

pub use qcore::{q_exp, q_log, QIndex, QNormal};
pub use solver::{Coefficients, Design, PathConfig, PenaltyKind, PenaltySpec, SolutionPath};
