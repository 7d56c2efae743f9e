//! Monte-Carlo harness: synthetic designs and responses, per-trial fitting
//! and selection, true-model counting and generalization error.

mod data;
mod summary;
mod trial;

pub use data::{gen_design, gen_response, generalization_error, make_true_theta, CopyBank};
pub use summary::{run_case, run_trials, summarize, CaseSummary, CellSummary, MethodBest};
pub use trial::{run_trial, trial_rng, trial_seed, CellResult, StreamTag, TrialResult};

use crate::qcore::QIndex;
use crate::solver::SolverError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("invalid experiment case: {0}")]
    InvalidCase(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// q values of the reference experiment grid.
pub const REFERENCE_Q_VALUES: [f64; 8] = [1.0, 13.0 / 11.0, 1.5, 5.0 / 3.0, 2.0, 2.01, 2.1, 2.5];

/// One cell of the experiment grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ExperimentCase {
    pub q: QIndex,
    pub n: usize,
    pub d: usize,
    /// Fraction of nonzero slopes.
    pub r_nz: f64,
    pub theta0: f64,
    pub m_trials: usize,
    /// Fresh test copies per trial for the generalization error.
    pub m_copies: usize,
    pub base_seed: u64,
}

impl ExperimentCase {
    pub fn new(q: f64, n: usize, d: usize, r_nz: f64, theta0: f64, m_trials: usize) -> Result<Self, SimError> {
        let q = QIndex::new(q).map_err(|e| SimError::InvalidCase(e.to_string()))?;
        let case = ExperimentCase { q, n, d, r_nz, theta0, m_trials, m_copies: 100, base_seed: 0 };
        case.validate()?;
        Ok(case)
    }

    pub fn with_copies(mut self, m_copies: usize) -> Self {
        self.m_copies = m_copies;
        self
    }

    pub fn with_seed(mut self, base_seed: u64) -> Self {
        self.base_seed = base_seed;
        self
    }

    /// Number of truly nonzero slopes, `d * r_nz`.
    pub fn nonzero_count(&self) -> Result<usize, SimError> {
        nonzero_count(self.d, self.r_nz)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |msg: String| Err(SimError::InvalidCase(msg));
        if self.n < crate::inference::DEFAULT_FOLDS {
            return bad(format!("n = {} is below the {} cross-validation folds", self.n, crate::inference::DEFAULT_FOLDS));
        }
        if self.d == 0 {
            return bad("d must be positive".into());
        }
        if !(self.theta0 > 0.0 && self.theta0.is_finite()) {
            return bad(format!("theta0 must be positive and finite, got {}", self.theta0));
        }
        if self.m_trials == 0 || self.m_copies == 0 {
            return bad("m_trials and m_copies must be positive".into());
        }
        self.nonzero_count().map(|_| ())
    }

    /// Short stable identifier used for file names.
    pub fn label(&self) -> String {
        format!(
            "q{}_n{}_d{}_r{}_t{}_m{}_c{}_s{}",
            self.q, self.n, self.d, self.r_nz, self.theta0, self.m_trials, self.m_copies, self.base_seed
        )
    }
}

fn nonzero_count(d: usize, r_nz: f64) -> Result<usize, SimError> {
    if !(r_nz > 0.0 && r_nz <= 1.0) {
        return Err(SimError::InvalidCase(format!("r_nz must lie in (0, 1], got {r_nz}")));
    }
    let exact = d as f64 * r_nz;
    let k = exact.round();
    if (exact - k).abs() > 1e-9 || k < 1.0 {
        return Err(SimError::InvalidCase(format!("d * r_nz = {exact} is not a positive integer")));
    }
    Ok(k as usize)
}
