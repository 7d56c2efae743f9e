use std::ops::Range;

use rayon::prelude::*;

use super::trial::{run_trial, TrialResult};
use super::{ExperimentCase, SimError};
use crate::inference::CriterionKind;
use crate::solver::PenaltyKind;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CellSummary {
    pub method: PenaltyKind,
    pub criterion: CriterionKind,
    /// Trials in which the true support was selected.
    pub count: usize,
    /// Trials in which a selection was made at all.
    pub available: usize,
    /// Mean generalization error over available trials.
    pub mean_error: Option<f64>,
    pub median_error: Option<f64>,
}

/// Best result of one method over a set of criteria.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MethodBest {
    pub method: PenaltyKind,
    pub best_count: usize,
    pub count_criterion: CriterionKind,
    pub best_mean_error: Option<f64>,
    pub error_criterion: Option<CriterionKind>,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CaseSummary {
    pub case: ExperimentCase,
    pub trials: usize,
    pub cells: Vec<CellSummary>,
    pub best: Vec<MethodBest>,
    /// Mean generalization error of the restricted MLE on the true support.
    pub oracle_mean_error: Option<f64>,
}

impl CaseSummary {
    pub fn cell(&self, method: PenaltyKind, criterion: CriterionKind) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.method == method && c.criterion == criterion)
    }

    pub fn best_for(&self, method: PenaltyKind) -> Option<&MethodBest> {
        self.best.iter().find(|b| b.method == method)
    }

    /// Best-criterion true-model rate of `method`.
    pub fn best_rate(&self, method: PenaltyKind) -> Option<f64> {
        self.best_for(method).map(|b| b.best_count as f64 / self.trials as f64)
    }
}

fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// Runs trials `indices` in parallel; results come back in index order.
pub fn run_trials(case: &ExperimentCase, indices: Range<usize>) -> Result<Vec<TrialResult>, SimError> {
    case.validate()?;
    indices.into_par_iter().map(|i| run_trial(case, i)).collect()
}

/// Runs all `m_trials` trials and summarizes them over every criterion.
pub fn run_case(case: &ExperimentCase) -> Result<CaseSummary, SimError> {
    let trials = run_trials(case, 0..case.m_trials)?;
    Ok(summarize(case, &trials, &CriterionKind::ALL))
}

/// Aggregates trials in the order given. The best-over-criteria entries only
/// consider `criteria`; ties go to the earlier criterion in that list.
pub fn summarize(case: &ExperimentCase, trials: &[TrialResult], criteria: &[CriterionKind]) -> CaseSummary {
    let mut cells = Vec::new();
    for method in PenaltyKind::ALL {
        for criterion in CriterionKind::ALL {
            let picked: Vec<_> = trials.iter().filter_map(|t| t.cell(method, criterion)).collect();
            let errors: Vec<f64> = picked.iter().filter_map(|c| c.gen_error).collect();
            cells.push(CellSummary {
                method,
                criterion,
                count: picked.iter().filter(|c| c.true_model).count(),
                available: picked.iter().filter(|c| c.support.is_some()).count(),
                mean_error: mean(&errors),
                median_error: median(&errors),
            });
        }
    }
    let best = PenaltyKind::ALL
        .into_iter()
        .filter_map(|method| {
            let candidates: Vec<&CellSummary> = criteria
                .iter()
                .filter_map(|&k| cells.iter().find(|c| c.method == method && c.criterion == k))
                .collect();
            let top = candidates.iter().fold(None::<&&CellSummary>, |b, c| match b {
                Some(b) if b.count >= c.count => Some(b),
                _ => Some(c),
            })?;
            let low = candidates
                .iter()
                .filter(|c| c.mean_error.is_some())
                .fold(None::<&&CellSummary>, |b, c| match b {
                    Some(b) if b.mean_error <= c.mean_error => Some(b),
                    _ => Some(c),
                });
            Some(MethodBest {
                method,
                best_count: top.count,
                count_criterion: top.criterion,
                best_mean_error: low.and_then(|c| c.mean_error),
                error_criterion: low.map(|c| c.criterion),
            })
        })
        .collect();
    let oracle: Vec<f64> = trials.iter().filter_map(|t| t.oracle_error).collect();
    CaseSummary { case: case.clone(), trials: trials.len(), cells, best, oracle_mean_error: mean(&oracle) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), Some(2.5));
        assert_eq!(median(&[]), None);
    }

    #[test]
    fn restricting_criteria_never_raises_counts() {
        let case = ExperimentCase::new(1.0, 30, 5, 0.2, 3.0, 4).unwrap().with_copies(3).with_seed(5);
        let trials = run_trials(&case, 0..4).unwrap();
        let full = summarize(&case, &trials, &CriterionKind::ALL);
        let some = summarize(&case, &trials, &[CriterionKind::Aic2, CriterionKind::Cv]);
        for m in PenaltyKind::ALL {
            assert!(some.best_for(m).unwrap().best_count <= full.best_for(m).unwrap().best_count);
            let e_full = full.best_for(m).unwrap().best_mean_error.unwrap();
            let e_some = some.best_for(m).unwrap().best_mean_error.unwrap();
            assert!(e_some >= e_full);
        }
    }
}
