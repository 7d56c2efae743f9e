//! Maximum L_q-likelihood estimator and the support-restricted MLE.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::likelihood::{log_likelihood, lq_likelihood};
use super::InferenceError;
use crate::linalg::least_squares;
use crate::qcore::QIndex;
use crate::solver::{Coefficients, Design};

pub const IRLS_TOL: f64 = 1e-8;
pub const IRLS_MAX_ITER: usize = 500;
pub const IRLS_GRAD_TOL: f64 = 1e-6;
/// Jittered restarts added to the least-squares start when `q >= 2`.
pub const IRLS_RESTARTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitSource {
    PathEstimate,
    RestrictedMle,
}

/// A fitted submodel together with the quantities the information criteria need.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ModelFit {
    pub theta_hat: Coefficients,
    /// Free parameters: support size plus the intercept.
    pub d_prime: usize,
    pub log_lik: f64,
    pub lq_lik: f64,
    pub source: FitSource,
}

impl ModelFit {
    pub fn evaluate(design: &Design, theta_hat: Coefficients, q: QIndex, source: FitSource) -> Self {
        let log_lik = log_likelihood(design, &theta_hat, q);
        let lq_lik = lq_likelihood(design, &theta_hat, q);
        let d_prime = theta_hat.support().len() + 1;
        ModelFit { theta_hat, d_prime, log_lik, lq_lik, source }
    }
}

/// Maximizer of the L_q-likelihood: ordinary least squares for every `q`.
pub fn mlqe(design: &Design, _q: QIndex) -> Result<Coefficients, InferenceError> {
    let theta = least_squares(design.x(), design.y())?;
    Ok(Coefficients::new(theta))
}

fn validate_support(design: &Design, support: &[usize]) -> Result<(), InferenceError> {
    for w in support.windows(2) {
        if w[0] >= w[1] {
            return Err(InferenceError::InvalidSupport(w[1]));
        }
    }
    if let Some(&bad) = support.iter().find(|&&i| i == 0 || i > design.d()) {
        return Err(InferenceError::InvalidSupport(bad));
    }
    Ok(())
}

fn embed(design: &Design, support: &[usize], sub: &DVector<f64>) -> Coefficients {
    let mut theta = DVector::zeros(design.d() + 1);
    theta[0] = sub[0];
    for (k, &i) in support.iter().enumerate() {
        theta[i] = sub[k + 1];
    }
    Coefficients::new(theta)
}

struct IrlsRun {
    theta: DVector<f64>,
    log_lik: f64,
    iterations: usize,
    converged: bool,
}

/// Sum of `ln f_q(r)` for unit dispersion, without constants, plus the IRLS weights.
fn kernel_and_weights(residuals: &DVector<f64>, q: QIndex) -> (f64, DVector<f64>) {
    let qv = q.value();
    if q.is_gaussian() {
        let ll = -0.5 * residuals.norm_squared();
        return (ll, DVector::from_element(residuals.len(), 1.0));
    }
    let k = (qv - 1.0) / (3.0 - qv);
    let ll = -residuals.iter().map(|r| (k * r * r).ln_1p()).sum::<f64>() / (qv - 1.0);
    let w = residuals.map(|r| 1.0 / (1.0 + k * r * r));
    (ll, w)
}

fn irls(
    xs: &DMatrix<f64>,
    y: &DVector<f64>,
    start: DVector<f64>,
    q: QIndex,
) -> Result<IrlsRun, InferenceError> {
    let mut theta = start;
    let mut residuals = y - xs * &theta;
    let (mut ll, mut w) = kernel_and_weights(&residuals, q);
    let score_scale = 2.0 / (3.0 - q.value());
    for iteration in 1..=IRLS_MAX_ITER {
        let sw = w.map(f64::sqrt);
        let mut xw = xs.clone();
        for (mut row, s) in xw.row_iter_mut().zip(sw.iter()) {
            row *= *s;
        }
        let yw = y.component_mul(&sw);
        let next = least_squares(&xw, &yw)?;
        let change = (&next - &theta).amax();
        let next_res = y - xs * &next;
        let (next_ll, next_w) = kernel_and_weights(&next_res, q);
        if next_ll < ll - 1e-12 * (1.0 + ll.abs()) {
            return Err(InferenceError::IrlsAscent { iteration, before: ll, after: next_ll });
        }
        theta = next;
        residuals = next_res;
        ll = next_ll;
        w = next_w;
        if change < IRLS_TOL {
            let grad = xs.transpose() * residuals.component_mul(&w) * score_scale;
            if grad.norm() <= IRLS_GRAD_TOL {
                return Ok(IrlsRun { theta, log_lik: ll, iterations: iteration, converged: true });
            }
        }
    }
    Ok(IrlsRun { theta, log_lik: ll, iterations: IRLS_MAX_ITER, converged: false })
}

fn support_seed(support: &[usize]) -> u64 {
    // FNV-1a over the support indices
    support.iter().fold(0xcbf2_9ce4_8422_2325_u64, |h, &i| (h ^ i as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Maximizes the log-likelihood over coefficients with `theta_j = 0` for `j`
/// outside `support` (the intercept is always free), by iteratively
/// reweighted least squares from the least-squares start.
///
/// For `q >= 2` the likelihood can be multimodal, so three jittered starts
/// are also tried and the best converged run is kept.
pub fn mle_restricted(design: &Design, support: &[usize], q: QIndex) -> Result<ModelFit, InferenceError> {
    validate_support(design, support)?;
    let cols: Vec<usize> = std::iter::once(0).chain(support.iter().copied()).collect();
    let xs = design.x().select_columns(cols.iter());
    let y = design.y();
    let ols = least_squares(&xs, y)?;

    let mut starts = vec![ols.clone()];
    if q.value() >= 2.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(support_seed(support));
        for _ in 0..IRLS_RESTARTS {
            starts.push(ols.map(|v| v + rng.sample::<f64, _>(StandardNormal)));
        }
    }

    let mut best: Option<IrlsRun> = None;
    let mut last_iterations = 0;
    for start in starts {
        let run = irls(&xs, y, start, q)?;
        last_iterations = run.iterations;
        if run.converged && best.as_ref().is_none_or(|b| run.log_lik > b.log_lik) {
            best = Some(run);
        }
    }
    let run = best.ok_or(InferenceError::MleNotConverged { iterations: last_iterations })?;
    let theta = embed(design, support, &run.theta);
    Ok(ModelFit::evaluate(design, theta, q, FitSource::RestrictedMle))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::standardize;
    use rand_distr::Distribution;
    use rand::Rng;

    fn q(v: f64) -> QIndex {
        QIndex::new(v).unwrap()
    }

    fn toy_design(n: usize, d: usize, seed: u64) -> Design {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw = DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut rng));
        let y = DVector::from_fn(n, |i, _| raw[(i, 0)] * 2.0 + rng.sample::<f64, _>(StandardNormal));
        standardize(&raw, &y).unwrap()
    }

    #[test]
    fn gaussian_restricted_mle_is_ols_in_one_step() {
        let design = toy_design(30, 3, 1);
        let fit = mle_restricted(&design, &[1, 3], q(1.0)).unwrap();
        let xs = design.x().select_columns([0, 1, 3].iter());
        let ols = least_squares(&xs, design.y()).unwrap();
        assert!((fit.theta_hat.theta()[1] - ols[1]).abs() < 1e-12);
        assert!((fit.theta_hat.theta()[3] - ols[2]).abs() < 1e-12);
        assert_eq!(fit.theta_hat.theta()[2], 0.0);
        assert_eq!(fit.d_prime, 3);
        let run = irls(&xs, design.y(), ols, q(1.0)).unwrap();
        assert_eq!(run.iterations, 1);
    }

    #[test]
    fn cauchy_intercept_only_symmetric() {
        let raw = DMatrix::from_column_slice(3, 1, &[0.0, 1.0, 5.0]);
        let design = standardize(&raw, &DVector::from_vec(vec![-1.0, 0.0, 1.0])).unwrap();
        let fit = mle_restricted(&design, &[], q(2.0)).unwrap();
        assert!(fit.theta_hat.intercept().abs() < 1e-8);
        assert_eq!(fit.d_prime, 1);
    }

    #[test]
    fn rejects_bad_supports() {
        let design = toy_design(10, 2, 2);
        assert_eq!(mle_restricted(&design, &[0], q(1.0)).unwrap_err(), InferenceError::InvalidSupport(0));
        assert_eq!(mle_restricted(&design, &[3], q(1.0)).unwrap_err(), InferenceError::InvalidSupport(3));
        assert!(mle_restricted(&design, &[2, 1], q(1.0)).is_err());
    }

    #[test]
    fn mlqe_is_q_invariant() {
        let design = toy_design(25, 4, 3);
        let a = mlqe(&design, q(1.0)).unwrap();
        let b = mlqe(&design, q(2.0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mlqe_reports_rank_deficiency() {
        let raw = DMatrix::from_fn(6, 2, |i, j| (i as f64) * if j == 0 { 1.0 } else { 3.0 });
        let design = standardize(&raw, &DVector::from_fn(6, |i, _| i as f64)).unwrap();
        match mlqe(&design, q(1.0)) {
            Err(InferenceError::Linalg(crate::linalg::LinalgError::RankDeficient { columns })) => {
                assert_eq!(columns, vec![2])
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
