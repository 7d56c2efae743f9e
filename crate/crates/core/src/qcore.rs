//! q-deformed elementary functions and the q-normal distribution family.
//!
//! The q-normal density is
//!
//! ```text
//! f_q(y | xi, sigma) = exp_q( -((y - xi)/sigma)^2 / (3 - q) ) / Z_q
//! ```
//!
//! For `1 < q < 3` this is a scaled Student-t with `nu = (3 - q)/(q - 1)`
//! degrees of freedom, so `q = 2` is Cauchy and `q = 1` is the Gaussian limit.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

/// Below this distance from 1 the q-functions use the exact log/exp limit.
pub const Q_ONE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QError {
    #[error("q = {0} is outside the supported range 1 <= q < 3")]
    IndexOutOfRange(f64),
    #[error("q_log requires u > 0, got {0}")]
    NonPositiveArgument(f64),
    #[error("dispersion sigma must be finite and > 0, got {0}")]
    InvalidSigma(f64),
    #[error("location xi must be finite, got {0}")]
    InvalidLocation(f64),
}

/// Entropic index `q`, restricted to `1 <= q < 3`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct QIndex(f64);

impl QIndex {
    pub const GAUSSIAN: QIndex = QIndex(1.0);

    pub fn new(q: f64) -> Result<Self, QError> {
        if q.is_finite() && (1.0..3.0).contains(&q) {
            Ok(QIndex(q))
        } else {
            Err(QError::IndexOutOfRange(q))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// True when the index is treated as exactly 1.
    #[inline]
    pub fn is_gaussian(self) -> bool {
        (self.0 - 1.0).abs() < Q_ONE_TOL
    }

    /// Student-t degrees of freedom `(3 - q)/(q - 1)`; `+inf` at `q = 1`.
    pub fn degrees_of_freedom(self) -> f64 {
        if self.is_gaussian() {
            f64::INFINITY
        } else {
            (3.0 - self.0) / (self.0 - 1.0)
        }
    }

    /// Index for a Student-t with `nu` degrees of freedom, `q = 1 + 2/(nu + 1)`.
    pub fn from_degrees_of_freedom(nu: f64) -> Result<Self, QError> {
        if nu.is_infinite() && nu > 0.0 {
            return Ok(QIndex::GAUSSIAN);
        }
        QIndex::new(1.0 + 2.0 / (nu + 1.0))
    }
}

impl TryFrom<f64> for QIndex {
    type Error = QError;
    fn try_from(q: f64) -> Result<Self, Self::Error> {
        QIndex::new(q)
    }
}

impl From<QIndex> for f64 {
    fn from(q: QIndex) -> f64 {
        q.0
    }
}

impl std::fmt::Display for QIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// q-logarithm `(u^(1-q) - 1)/(1 - q)`, the natural log at `q = 1`.
pub fn q_log(u: f64, q: QIndex) -> Result<f64, QError> {
    if !(u > 0.0) {
        return Err(QError::NonPositiveArgument(u));
    }
    Ok(q_log_unchecked(u, q.value()))
}

/// q-logarithm for any real `q`, `u > 0` assumed.
pub(crate) fn q_log_unchecked(u: f64, q: f64) -> f64 {
    let one_minus_q = 1.0 - q;
    if one_minus_q.abs() < Q_ONE_TOL {
        u.ln()
    } else {
        (one_minus_q * u.ln()).exp_m1() / one_minus_q
    }
}

/// q-exponential `{1 + (1-q)u}_+^(1/(1-q))`, the ordinary exponential at `q = 1`.
pub fn q_exp(u: f64, q: QIndex) -> f64 {
    let one_minus_q = 1.0 - q.value();
    if one_minus_q.abs() < Q_ONE_TOL {
        return u.exp();
    }
    let base = one_minus_q * u;
    if base <= -1.0 {
        0.0
    } else {
        (base.ln_1p() / one_minus_q).exp()
    }
}

/// Largest `a` for which `Gamma(a + 1/2)` is formed directly.
const GAMMA_DIRECT_MAX: f64 = 150.0;

/// `B(a, 1/2) = pi * Gamma(a) / (Gamma(1/2) Gamma(a + 1/2))`; exactly `pi` at `a = 1/2`.
fn beta_half(a: f64) -> f64 {
    PI * (libm::tgamma(a) / (libm::tgamma(0.5) * libm::tgamma(a + 0.5)))
}

/// `ln(Gamma(a + 1/2) / Gamma(a))` from its asymptotic series; large `a` only.
fn ln_half_gamma_ratio(a: f64) -> f64 {
    let inv = 1.0 / a;
    let inv2 = inv * inv;
    0.5 * a.ln() - inv * (1.0 / 8.0 - inv2 * (1.0 / 192.0 - inv2 * (1.0 / 640.0 - inv2 * 17.0 / 14336.0)))
}

/// A q-normal distribution with location `xi` and dispersion `sigma`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct QNormal {
    q: QIndex,
    xi: f64,
    sigma: f64,
}

impl QNormal {
    pub fn new(q: QIndex, xi: f64, sigma: f64) -> Result<Self, QError> {
        if !xi.is_finite() {
            return Err(QError::InvalidLocation(xi));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(QError::InvalidSigma(sigma));
        }
        Ok(QNormal { q, xi, sigma })
    }

    /// Zero location, unit dispersion: the error law of the q-normal linear model.
    pub fn standard(q: QIndex) -> Self {
        QNormal { q, xi: 0.0, sigma: 1.0 }
    }

    pub fn q(&self) -> QIndex {
        self.q
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn degrees_of_freedom(&self) -> f64 {
        self.q.degrees_of_freedom()
    }

    /// `Z_q = sigma * sqrt(nu) * B(nu/2, 1/2)`, or `sigma * sqrt(2 pi)` at `q = 1`.
    pub fn normalizing_constant(&self) -> f64 {
        if self.q.is_gaussian() {
            return self.sigma * (2.0 * PI).sqrt();
        }
        let nu = self.degrees_of_freedom();
        let a = 0.5 * nu;
        if a <= GAMMA_DIRECT_MAX {
            let z = self.sigma * nu.sqrt() * beta_half(a);
            if z.is_finite() && z > 0.0 {
                return z;
            }
        }
        self.ln_normalizing_constant().exp()
    }

    pub fn ln_normalizing_constant(&self) -> f64 {
        let ln_sigma = self.sigma.ln();
        if self.q.is_gaussian() {
            return ln_sigma + 0.5 * (2.0 * PI).ln();
        }
        let nu = self.degrees_of_freedom();
        let a = 0.5 * nu;
        if a <= GAMMA_DIRECT_MAX {
            let b = beta_half(a);
            if b.is_finite() && b > 0.0 {
                return ln_sigma + 0.5 * nu.ln() + b.ln();
            }
            return ln_sigma + 0.5 * nu.ln() + libm::lgamma(a) + 0.5 * PI.ln() - libm::lgamma(a + 0.5);
        }
        ln_sigma + 0.5 * nu.ln() + 0.5 * PI.ln() - ln_half_gamma_ratio(a)
    }

    pub fn density(&self, y: f64) -> f64 {
        let u = (y - self.xi) / self.sigma;
        q_exp(-u * u / (3.0 - self.q.value()), self.q) / self.normalizing_constant()
    }

    /// Natural log of the density, evaluated without forming the density itself.
    pub fn ln_density(&self, y: f64) -> f64 {
        let u = (y - self.xi) / self.sigma;
        -self.ln_normalizing_constant() + self.ln_kernel(u * u)
    }

    /// `ln exp_q(-u2/(3-q))` for a squared standardized residual `u2`.
    pub(crate) fn ln_kernel(&self, u2: f64) -> f64 {
        let q = self.q.value();
        if self.q.is_gaussian() {
            -0.5 * u2
        } else {
            -((q - 1.0) / (3.0 - q) * u2).ln_1p() / (q - 1.0)
        }
    }

    /// Draws one value as `xi + sigma * T`, with `T` standard normal at `q = 1`
    /// and Student-t otherwise.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        if self.q.is_gaussian() {
            return self.xi + self.sigma * z;
        }
        let nu = self.degrees_of_freedom();
        // nu > 0 always holds for q in (1, 3)
        let chi2 = ChiSquared::new(nu).expect("positive degrees of freedom");
        let v: f64 = chi2.sample(rng);
        self.xi + self.sigma * z / (v / nu).sqrt()
    }

    pub fn sample<R: Rng + ?Sized>(&self, count: usize, rng: &mut R) -> Vec<f64> {
        (0..count).map(|_| self.sample_one(rng)).collect()
    }

    /// Variance of the distribution; infinite for `q >= 5/3`.
    pub fn variance(&self) -> f64 {
        let nu = self.degrees_of_freedom();
        let s2 = self.sigma * self.sigma;
        if nu.is_infinite() {
            s2
        } else if nu > 2.0 {
            s2 * nu / (nu - 2.0)
        } else {
            f64::INFINITY
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(v: f64) -> QIndex {
        QIndex::new(v).unwrap()
    }

    #[test]
    fn q_log_examples() {
        assert_eq!(q_log(1.0, q(2.0)).unwrap(), 0.0);
        assert!((q_log(2.0, q(2.0)).unwrap() - 0.5).abs() < 1e-15);
        assert!((q_log(std::f64::consts::E, q(1.0)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(q_log(0.0, q(1.5)), Err(QError::NonPositiveArgument(0.0)));
        assert!(q_log(-1.0, q(1.0)).is_err());
    }

    #[test]
    fn q_exp_examples() {
        assert_eq!(q_exp(0.0, q(2.0)), 1.0);
        assert!((q_exp(-2.0, q(2.0)) - 1.0 / 3.0).abs() < 1e-15);
        assert!((q_exp(1.0, q(1.0)) - std::f64::consts::E).abs() < 1e-15);
        // 1 + (1 - q) u <= 0 cuts off to zero
        assert_eq!(q_exp(1.0, q(2.0)), 0.0);
        assert_eq!(q_exp(2.0, q(1.5)), 0.0);
    }

    #[test]
    fn index_range() {
        assert!(QIndex::new(0.99).is_err());
        assert!(QIndex::new(3.0).is_err());
        assert!(QIndex::new(f64::NAN).is_err());
        assert!(QIndex::new(2.999).is_ok());
        assert_eq!(q(1.0).degrees_of_freedom(), f64::INFINITY);
        assert!((q(2.0).degrees_of_freedom() - 1.0).abs() < 1e-15);
        assert!((q(13.0 / 11.0).degrees_of_freedom() - 10.0).abs() < 1e-12);
        assert!((QIndex::from_degrees_of_freedom(3.0).unwrap().value() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn qnormal_rejects_bad_parameters() {
        assert!(QNormal::new(q(1.5), 0.0, 0.0).is_err());
        assert!(QNormal::new(q(1.5), 0.0, -1.0).is_err());
        assert!(QNormal::new(q(1.5), f64::INFINITY, 1.0).is_err());
    }

    #[test]
    fn normalizing_constant_closed_forms() {
        let z1 = QNormal::standard(q(1.0)).normalizing_constant();
        assert!((z1 - (2.0 * PI).sqrt()).abs() < 1e-14);
        let z2 = QNormal::standard(q(2.0)).normalizing_constant();
        assert!((z2 - PI).abs() < 1e-13);
        let scaled = QNormal::new(q(2.0), 0.0, 2.5).unwrap().normalizing_constant();
        assert!((scaled - 2.5 * PI).abs() < 1e-12);
    }

    #[test]
    fn density_examples() {
        let cauchy = QNormal::standard(q(2.0));
        assert!((cauchy.density(0.0) - 1.0 / PI).abs() < 1e-15);
        let gauss = QNormal::new(q(1.0), 3.0, 1.0).unwrap();
        assert!((gauss.density(3.0) - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
        let t3 = QNormal::standard(q(1.5));
        assert_eq!(t3.density(3.0), t3.density(-3.0));
    }

    #[test]
    fn ln_density_matches_density() {
        for &qv in &[1.0, 13.0 / 11.0, 1.5, 5.0 / 3.0, 2.0, 2.5] {
            let dist = QNormal::new(q(qv), 0.7, 1.3).unwrap();
            for i in -40..=40 {
                let y = i as f64 * 0.25;
                let a = dist.ln_density(y);
                let b = dist.density(y).ln();
                assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()), "q={qv} y={y}");
            }
        }
    }

    #[test]
    fn cauchy_matches_explicit_formula() {
        let sigma = 1.7;
        let xi = -0.4;
        let dist = QNormal::new(q(2.0), xi, sigma).unwrap();
        for i in -100..=100 {
            let y = i as f64 * 0.13;
            let explicit = 1.0 / (sigma * PI * (1.0 + (y - xi).powi(2) / (sigma * sigma)));
            let got = dist.density(y);
            assert!((got - explicit).abs() <= 1e-12 * explicit.max(1e-300), "y={y}");
        }
    }

    #[test]
    fn student_t_matches_explicit_formula() {
        use statrs::function::beta::beta;
        let nu = 3.0;
        let dist = QNormal::new(QIndex::from_degrees_of_freedom(nu).unwrap(), 0.0, 1.0).unwrap();
        for i in -50..=50 {
            let y = i as f64 * 0.2;
            let explicit =
                (1.0 + y * y / nu).powf(-(nu + 1.0) / 2.0) / (nu.sqrt() * beta(nu / 2.0, 0.5));
            assert!((dist.density(y) - explicit).abs() < 1e-13);
        }
    }

    #[test]
    fn sampling_is_seeded() {
        let dist = QNormal::standard(q(1.5));
        let a = dist.sample(50, &mut ChaCha8Rng::seed_from_u64(11));
        let b = dist.sample(50, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
    }

    #[test]
    fn normal_sample_moments() {
        let dist = QNormal::standard(q(1.0));
        let xs = dist.sample(100_000, &mut ChaCha8Rng::seed_from_u64(3));
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        assert!(mean.abs() < 0.02);
        assert!((var - 1.0).abs() < 0.05);
    }

    #[test]
    fn cauchy_sample_median() {
        let dist = QNormal::new(q(2.0), 5.0, 1.0).unwrap();
        let mut xs = dist.sample(100_000, &mut ChaCha8Rng::seed_from_u64(5));
        xs.sort_by(f64::total_cmp);
        let median = xs[xs.len() / 2];
        assert!((median - 5.0).abs() < 0.05);
    }

    #[test]
    fn variance_closed_form() {
        assert_eq!(QNormal::standard(q(1.0)).variance(), 1.0);
        assert!((QNormal::standard(q(1.5)).variance() - 3.0).abs() < 1e-12);
        assert!((QNormal::standard(q(13.0 / 11.0)).variance() - 1.25).abs() < 1e-12);
        assert_eq!(QNormal::standard(q(5.0 / 3.0)).variance(), f64::INFINITY);
    }
}
