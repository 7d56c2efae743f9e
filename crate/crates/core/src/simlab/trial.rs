use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::data::{gen_design, gen_response, make_true_theta, CopyBank};
use super::{ExperimentCase, SimError};
use crate::inference::{
    cross_validate_on_grid, mle_restricted, select_model_cached, CriterionKind, MleCache, DEFAULT_FOLDS,
};
use crate::solver::{solve_path, Coefficients, PathConfig, PenaltyKind, PenaltySpec};

/// Independent random streams within one trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamTag {
    Design = 1,
    Noise = 2,
    CrossValidation = 3,
    Copies = 4,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of trial `index` under `base_seed`.
pub fn trial_seed(base_seed: u64, index: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(index as u64))
}

pub fn trial_rng(seed: u64, tag: StreamTag) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag as u64);
    rng
}

/// Outcome of one (method, criterion) pair in a trial.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CellResult {
    pub method: PenaltyKind,
    pub criterion: CriterionKind,
    pub lambda_index: Option<usize>,
    pub support: Option<Vec<usize>>,
    pub true_model: bool,
    pub gen_error: Option<f64>,
    pub path_converged: bool,
    /// Why no selection was made, if none was.
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrialResult {
    pub index: usize,
    pub seed: u64,
    pub true_support: Vec<usize>,
    /// Supports whose restricted MLE failed.
    pub mle_failures: usize,
    /// Generalization error of the restricted MLE on the true support.
    pub oracle_error: Option<f64>,
    pub cells: Vec<CellResult>,
}

impl TrialResult {
    pub fn cell(&self, method: PenaltyKind, criterion: CriterionKind) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.method == method && c.criterion == criterion)
    }
}

fn failed_cell(method: PenaltyKind, criterion: CriterionKind, path_converged: bool, why: String) -> CellResult {
    CellResult {
        method,
        criterion,
        lambda_index: None,
        support: None,
        true_model: false,
        gen_error: None,
        path_converged,
        failure: Some(why),
    }
}

fn chosen_cell(
    method: PenaltyKind,
    criterion: CriterionKind,
    index: usize,
    estimate: &Coefficients,
    truth: &Coefficients,
    bank: &CopyBank,
    path_converged: bool,
) -> CellResult {
    CellResult {
        method,
        criterion,
        lambda_index: Some(index),
        support: Some(estimate.support().to_vec()),
        true_model: estimate.support() == truth.support(),
        gen_error: Some(bank.error(estimate)),
        path_converged,
        failure: None,
    }
}

/// Runs trial `index` of `case`: generates data, fits the three penalties
/// along their paths, selects with every criterion and scores each selected
/// estimate: the restricted MLE for the refit criteria, the path estimate
/// otherwise. Failures are recorded per cell.
pub fn run_trial(case: &ExperimentCase, index: usize) -> Result<TrialResult, SimError> {
    case.validate()?;
    let seed = trial_seed(case.base_seed, index);
    let truth = make_true_theta(case.d, case.r_nz, case.theta0)?;
    let base = gen_design(case.n, case.d, &mut trial_rng(seed, StreamTag::Design))?;
    let y = gen_response(&base, &truth, case.q, &mut trial_rng(seed, StreamTag::Noise));
    let design = base.with_response(y)?;
    let bank = CopyBank::generate(&truth, case.q, case.n, case.m_copies, &mut trial_rng(seed, StreamTag::Copies))?;
    let config = PathConfig::default();

    let mut cache = MleCache::new();
    let mut cells = Vec::with_capacity(PenaltyKind::ALL.len() * CriterionKind::ALL.len());
    for method in PenaltyKind::ALL {
        let spec = PenaltySpec::new(method);
        let path = match solve_path(&design, &spec, &config) {
            Ok(p) => p,
            Err(e) => {
                cells.extend(CriterionKind::ALL.map(|k| failed_cell(method, k, false, e.to_string())));
                continue;
            }
        };
        let converged = path.all_converged();
        for criterion in CriterionKind::ALL {
            let picked = if criterion == CriterionKind::Cv {
                let mut rng = trial_rng(seed, StreamTag::CrossValidation);
                cross_validate_on_grid(&design, &spec, &path.lambdas, &config, DEFAULT_FOLDS, &mut rng)
                    .map(|cv| (cv.index, path.coefs[cv.index].clone()))
            } else {
                select_model_cached(&path, criterion, &design, case.q, &mut cache).map(|s| (s.index, s.fit.theta_hat))
            };
            cells.push(match picked {
                Ok((i, estimate)) => chosen_cell(method, criterion, i, &estimate, &truth, &bank, converged),
                Err(e) => failed_cell(method, criterion, converged, e.to_string()),
            });
        }
    }
    let oracle_error = mle_restricted(&design, truth.support(), case.q).ok().map(|fit| bank.error(&fit.theta_hat));
    Ok(TrialResult {
        index,
        seed,
        true_support: truth.support().to_vec(),
        mle_failures: cache.failures(),
        oracle_error,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::RngCore;

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let s = trial_seed(7, 3);
        assert_eq!(s, trial_seed(7, 3));
        assert_ne!(s, trial_seed(7, 4));
        assert_ne!(s, trial_seed(8, 3));
        let a = trial_rng(s, StreamTag::Design).next_u64();
        assert_eq!(a, trial_rng(s, StreamTag::Design).next_u64());
        assert_ne!(a, trial_rng(s, StreamTag::Noise).next_u64());
    }

    #[test]
    fn trial_is_deterministic_and_complete() {
        let case = ExperimentCase::new(1.0, 40, 5, 0.4, 10.0, 1).unwrap().with_copies(5).with_seed(42);
        let a = run_trial(&case, 0).unwrap();
        let b = run_trial(&case, 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 27);
        assert_eq!(a.true_support, vec![1, 2]);
        for c in &a.cells {
            if let Some(s) = &c.support {
                assert_eq!(c.true_model, s == &a.true_support);
            }
        }
    }
}
