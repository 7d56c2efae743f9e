//! K-fold cross-validation over a fixed lambda grid.

use rand::seq::SliceRandom;
use rand::Rng;

use super::InferenceError;
use crate::solver::{lambda_grid, lambda_max, solve_on_grid, Design, PathConfig, PenaltySpec};

pub const DEFAULT_FOLDS: usize = 10;

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CvResult {
    pub lambdas: Vec<f64>,
    /// Mean squared prediction error on held-out rows, per lambda.
    pub errors: Vec<f64>,
    pub index: usize,
    pub skipped_folds: Vec<usize>,
}

/// Fold label of each row: a seeded shuffle cut into `folds` contiguous,
/// near-equal blocks.
pub fn fold_assignment<R: Rng + ?Sized>(n: usize, folds: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut labels = vec![0; n];
    for (pos, &row) in order.iter().enumerate() {
        labels[row] = pos * folds / n;
    }
    labels
}

/// Cross-validates `spec` on the default lambda grid of the full design.
pub fn cross_validate<R: Rng + ?Sized>(
    design: &Design,
    spec: &PenaltySpec,
    config: &PathConfig,
    folds: usize,
    rng: &mut R,
) -> Result<CvResult, InferenceError> {
    let grid = lambda_grid(lambda_max(design), config.n_lambda, config.min_ratio_for(design.n(), design.d()));
    cross_validate_on_grid(design, spec, &grid, config, folds, rng)
}

/// Cross-validates on a caller-supplied grid; each fold's model is fitted on
/// the complementary rows over the same lambdas. The chosen index minimizes
/// the error, ties going to the larger lambda.
pub fn cross_validate_on_grid<R: Rng + ?Sized>(
    design: &Design,
    spec: &PenaltySpec,
    lambdas: &[f64],
    config: &PathConfig,
    folds: usize,
    rng: &mut R,
) -> Result<CvResult, InferenceError> {
    let n = design.n();
    if folds < 2 || folds > n {
        return Err(InferenceError::InvalidFolds { folds, n });
    }
    let labels = fold_assignment(n, folds, rng);
    let mut sse = vec![0.0; lambdas.len()];
    let mut held_out = 0usize;
    let mut skipped = Vec::new();
    for fold in 0..folds {
        let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&a| labels[a] == fold);
        let train_design = design.subset_rows(&train);
        if train.len() < 2 || (1..=design.d()).any(|j| train_design.col_sq_norm(j) == 0.0) {
            log::warn!("cross-validation fold {fold} has a degenerate training design; skipped");
            skipped.push(fold);
            continue;
        }
        let path = solve_on_grid(&train_design, spec, lambdas, config)?;
        let test_design = design.subset_rows(&test);
        for (k, coefs) in path.coefs.iter().enumerate() {
            sse[k] += test_design.rss(coefs);
        }
        held_out += test.len();
    }
    if held_out == 0 {
        return Err(InferenceError::AllFoldsDegenerate);
    }
    let errors: Vec<f64> = sse.iter().map(|s| s / held_out as f64).collect();
    let index = errors
        .iter()
        .enumerate()
        .fold(0, |best, (k, &e)| if e < errors[best] { k } else { best });
    Ok(CvResult { lambdas: lambdas.to_vec(), errors, index, skipped_folds: skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn folds_are_near_equal() {
        let labels = fold_assignment(23, 5, &mut ChaCha8Rng::seed_from_u64(1));
        let mut counts = [0usize; 5];
        for l in labels {
            counts[l] += 1;
        }
        assert!(counts.iter().all(|&c| c == 4 || c == 5), "{counts:?}");
        assert_eq!(counts.iter().sum::<usize>(), 23);
    }

    #[test]
    fn fold_assignment_is_seeded() {
        let a = fold_assignment(40, 10, &mut ChaCha8Rng::seed_from_u64(9));
        let b = fold_assignment(40, 10, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}
