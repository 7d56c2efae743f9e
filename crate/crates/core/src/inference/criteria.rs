//! Information criteria and model selection along a solution path.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::mle::{mle_restricted, FitSource, ModelFit};
use super::InferenceError;
use crate::qcore::QIndex;
use crate::solver::{Design, SolutionPath};

/// Criteria for picking one estimate from a path. The `1` variants score the
/// restricted MLE on each path support, the `2` variants score the path
/// estimate itself; the `Lq` variants use the L_q-likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum CriterionKind {
    #[serde(rename = "AIC1")]
    Aic1,
    #[serde(rename = "AIC2")]
    Aic2,
    #[serde(rename = "BIC1")]
    Bic1,
    #[serde(rename = "BIC2")]
    Bic2,
    #[serde(rename = "LqAIC1")]
    LqAic1,
    #[serde(rename = "LqAIC2")]
    LqAic2,
    #[serde(rename = "LqBIC1")]
    LqBic1,
    #[serde(rename = "LqBIC2")]
    LqBic2,
    #[serde(rename = "CV")]
    Cv,
}

impl CriterionKind {
    pub const ALL: [CriterionKind; 9] = [
        CriterionKind::Aic1,
        CriterionKind::Aic2,
        CriterionKind::Bic1,
        CriterionKind::Bic2,
        CriterionKind::LqAic1,
        CriterionKind::LqAic2,
        CriterionKind::LqBic1,
        CriterionKind::LqBic2,
        CriterionKind::Cv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CriterionKind::Aic1 => "AIC1",
            CriterionKind::Aic2 => "AIC2",
            CriterionKind::Bic1 => "BIC1",
            CriterionKind::Bic2 => "BIC2",
            CriterionKind::LqAic1 => "LqAIC1",
            CriterionKind::LqAic2 => "LqAIC2",
            CriterionKind::LqBic1 => "LqBIC1",
            CriterionKind::LqBic2 => "LqBIC2",
            CriterionKind::Cv => "CV",
        }
    }

    /// Scored on the restricted MLE rather than the path estimate.
    pub fn uses_refit(self) -> bool {
        matches!(self, CriterionKind::Aic1 | CriterionKind::Bic1 | CriterionKind::LqAic1 | CriterionKind::LqBic1)
    }

    pub fn uses_lq(self) -> bool {
        matches!(self, CriterionKind::LqAic1 | CriterionKind::LqAic2 | CriterionKind::LqBic1 | CriterionKind::LqBic2)
    }

    pub fn is_bic(self) -> bool {
        matches!(self, CriterionKind::Bic1 | CriterionKind::Bic2 | CriterionKind::LqBic1 | CriterionKind::LqBic2)
    }
}

impl fmt::Display for CriterionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CriterionKind {
    type Err = InferenceError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CriterionKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| InferenceError::UnknownCriterion(s.to_string()))
    }
}

/// `-2 loglik + 2 d'` (AIC) or `-2 loglik + d' ln n` (BIC); the L_q variants
/// use the L_q-likelihood in place of the log-likelihood.
pub fn criterion_value(kind: CriterionKind, fit: &ModelFit, n: usize) -> Result<f64, InferenceError> {
    if kind == CriterionKind::Cv {
        return Err(InferenceError::CvNotACriterion);
    }
    let lik = if kind.uses_lq() { fit.lq_lik } else { fit.log_lik };
    let per_param = if kind.is_bic() { (n as f64).ln() } else { 2.0 };
    Ok(penalized_deviance(lik, fit.d_prime, per_param))
}

/// `-2 lik + per_param * d'`.
pub fn penalized_deviance(lik: f64, d_prime: usize, per_param: f64) -> f64 {
    -2.0 * lik + per_param * d_prime as f64
}

/// Restricted MLEs keyed by support, shared across criteria for one design and `q`.
#[derive(Debug, Default)]
pub struct MleCache {
    fits: HashMap<Vec<usize>, Result<ModelFit, InferenceError>>,
}

impl MleCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_fit(&mut self, design: &Design, support: &[usize], q: QIndex) -> &Result<ModelFit, InferenceError> {
        self.fits.entry(support.to_vec()).or_insert_with(|| mle_restricted(design, support, q))
    }

    pub fn len(&self) -> usize {
        self.fits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fits.is_empty()
    }

    /// Number of cached supports whose fit failed.
    pub fn failures(&self) -> usize {
        self.fits.values().filter(|r| r.is_err()).count()
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Selection {
    pub index: usize,
    pub fit: ModelFit,
    pub value: f64,
    /// Criterion value at every path point; `None` where unavailable.
    pub values: Vec<Option<f64>>,
}

/// Evaluates `kind` at every path point and returns the minimizer.
///
/// Ties go to the smaller `d'`, then to the larger lambda. Points whose
/// restricted MLE failed are skipped.
pub fn select_model(
    path: &SolutionPath,
    kind: CriterionKind,
    design: &Design,
    q: QIndex,
) -> Result<Selection, InferenceError> {
    select_model_cached(path, kind, design, q, &mut MleCache::new())
}

pub fn select_model_cached(
    path: &SolutionPath,
    kind: CriterionKind,
    design: &Design,
    q: QIndex,
    cache: &mut MleCache,
) -> Result<Selection, InferenceError> {
    if kind == CriterionKind::Cv {
        return Err(InferenceError::CvNotACriterion);
    }
    let n = design.n();
    let mut values = Vec::with_capacity(path.len());
    let mut best: Option<(f64, usize, usize, ModelFit)> = None;
    for (index, coefs) in path.coefs.iter().enumerate() {
        let fit = if kind.uses_refit() {
            match cache.get_or_fit(design, coefs.support(), q) {
                Ok(fit) => fit.clone(),
                Err(_) => {
                    values.push(None);
                    continue;
                }
            }
        } else {
            ModelFit::evaluate(design, coefs.clone(), q, FitSource::PathEstimate)
        };
        let value = criterion_value(kind, &fit, n)?;
        values.push(Some(value));
        let better = match &best {
            None => true,
            Some((bv, bd, _, _)) => value < *bv || (value == *bv && fit.d_prime < *bd),
        };
        if better {
            best = Some((value, fit.d_prime, index, fit));
        }
    }
    let (value, _, index, fit) = best.ok_or(InferenceError::NoSelection)?;
    Ok(Selection { index, fit, value, values })
}
