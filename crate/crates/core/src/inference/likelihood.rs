//! Ordinary and L_q log-likelihoods of the q-normal linear model with unit
//! dispersion.

use crate::qcore::{q_log_unchecked, QIndex, QNormal};
use crate::solver::{Coefficients, Design};

/// `sum_a ln f_q(y_a - x_a theta)` with `f_q` the standard q-normal density.
pub fn log_likelihood(design: &Design, theta: &Coefficients, q: QIndex) -> f64 {
    let dist = QNormal::standard(q);
    design.residuals(theta).iter().map(|&r| dist.ln_density(r)).sum()
}

/// `sum_a log_q f_q(y_a - x_a theta)`, evaluated term by term.
pub fn lq_likelihood(design: &Design, theta: &Coefficients, q: QIndex) -> f64 {
    let dist = QNormal::standard(q);
    design
        .residuals(theta)
        .iter()
        .map(|&r| q_log_of_ln(dist.ln_density(r), q))
        .sum()
}

/// `log_q(u)` given `ln u`, without forming `u`.
pub(crate) fn q_log_of_ln(ln_u: f64, q: QIndex) -> f64 {
    if q.is_gaussian() {
        ln_u
    } else {
        let one_minus_q = 1.0 - q.value();
        (one_minus_q * ln_u).exp_m1() / one_minus_q
    }
}

/// Coefficient `c = Z_q^(q-1) / (3 - q)` of the residual sum of squares in
/// the L_q-likelihood.
pub fn lq_rss_coefficient(q: QIndex) -> f64 {
    let z = QNormal::standard(q).normalizing_constant();
    z.powf(q.value() - 1.0) / (3.0 - q.value())
}

/// Per-observation constant `log_q(1 / Z_q)` of the L_q-likelihood.
pub fn lq_constant(q: QIndex) -> f64 {
    let z = QNormal::standard(q).normalizing_constant();
    q_log_unchecked(1.0 / z, q.value())
}

/// Closed form `-c ||y - X theta||^2 + n log_q(1/Z_q)`.
///
/// The L_q-likelihood is a strictly decreasing affine function of the
/// residual sum of squares, so its maximizer is the least-squares fit.
pub fn lq_likelihood_closed_form(design: &Design, theta: &Coefficients, q: QIndex) -> f64 {
    -lq_rss_coefficient(q) * design.rss(theta) + design.n() as f64 * lq_constant(q)
}
