use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::{nonzero_count, SimError};
use crate::qcore::{QIndex, QNormal};
use crate::solver::{standardize, Coefficients, Design, SolverError};

/// Intercept zero, the first `d * r_nz` slopes equal to `theta0`, the rest zero.
pub fn make_true_theta(d: usize, r_nz: f64, theta0: f64) -> Result<Coefficients, SimError> {
    let k = nonzero_count(d, r_nz)?;
    let mut theta = DVector::zeros(d + 1);
    theta.rows_mut(1, k).fill(theta0);
    Ok(Coefficients::new(theta))
}

fn raw_normal<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> DMatrix<f64> {
    // column-major fill
    DMatrix::from_iterator(n, d, (0..n * d).map(|_| rng.sample::<f64, _>(StandardNormal)))
}

/// Standardized i.i.d. standard-normal design with a zero response.
pub fn gen_design<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Design, SolverError> {
    standardize(&raw_normal(n, d, rng), &DVector::zeros(n))
}

/// `X theta_true + eps` with `eps` i.i.d. standard q-normal.
pub fn gen_response<R: Rng + ?Sized>(design: &Design, theta_true: &Coefficients, q: QIndex, rng: &mut R) -> DVector<f64> {
    let noise = QNormal::standard(q).sample(design.n(), rng);
    design.x() * theta_true.theta() + DVector::from_vec(noise)
}

/// Fresh `(y', X')` copies summarized by their averaged cross products.
///
/// For copy `c` with design `X_c` and noise `e_c`, `y_c - X_c t = X_c (t* - t) + e_c`,
/// so the mean over copies of `|y_c - X_c t|^2 / n` is `u'Gu + 2h'u + s`
/// with `u = t* - t`. The bank stores `G`, `h` and `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct CopyBank {
    theta_true: Coefficients,
    gram: DMatrix<f64>,
    cross: DVector<f64>,
    noise_sq: f64,
    copies: usize,
}

impl CopyBank {
    pub fn generate<R: Rng + ?Sized>(
        theta_true: &Coefficients,
        q: QIndex,
        n: usize,
        m_copies: usize,
        rng: &mut R,
    ) -> Result<Self, SolverError> {
        let d = theta_true.d();
        let mut gram = DMatrix::zeros(d + 1, d + 1);
        let mut cross = DVector::zeros(d + 1);
        let mut noise_sq = 0.0;
        let dist = QNormal::standard(q);
        for _ in 0..m_copies {
            let design = gen_design(n, d, rng)?;
            let eps = DVector::from_vec(dist.sample(n, rng));
            let x = design.x();
            gram += x.tr_mul(x);
            cross += x.tr_mul(&eps);
            noise_sq += eps.norm_squared();
        }
        let scale = 1.0 / (m_copies as f64 * n as f64);
        Ok(CopyBank { theta_true: theta_true.clone(), gram: gram * scale, cross: cross * scale, noise_sq: noise_sq * scale, copies: m_copies })
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    /// Mean over copies of `|y' - X' theta_hat|^2 / n`.
    pub fn error(&self, theta_hat: &Coefficients) -> f64 {
        let u = self.theta_true.theta() - theta_hat.theta();
        let quad = u.dot(&(&self.gram * &u));
        (quad + 2.0 * self.cross.dot(&u) + self.noise_sq).max(0.0)
    }
}

/// Draws `m_copies` fresh `(y', X')` pairs of size `n` and returns the mean
/// over copies of `|y' - X' theta_hat|^2 / n`.
pub fn generalization_error<R: Rng + ?Sized>(
    theta_hat: &Coefficients,
    theta_true: &Coefficients,
    q: QIndex,
    n: usize,
    m_copies: usize,
    rng: &mut R,
) -> Result<f64, SolverError> {
    if theta_hat.d() != theta_true.d() {
        return Err(SolverError::DimensionMismatch { expected: theta_true.d(), found: theta_hat.d() });
    }
    Ok(CopyBank::generate(theta_true, q, n, m_copies, rng)?.error(theta_hat))
}
