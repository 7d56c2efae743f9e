use nalgebra::{DMatrix, DVector};

use super::{Coefficients, SolverError};

/// Per-column transform applied by [`standardize`]: `x_std = (x_raw - mean) / scale`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

/// Design matrix with a leading column of ones plus the response.
///
/// Designs built by [`standardize`] have slope columns that sum to zero and
/// have unit Euclidean norm. Row subsets (used for cross-validation folds)
/// keep the parent's standardization record but not its column norms.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    x: DMatrix<f64>,
    y: DVector<f64>,
    col_sq_norms: Vec<f64>,
    standardization: Standardization,
}

/// Centers each raw predictor and scales it to unit Euclidean norm, then
/// prepends the intercept column.
pub fn standardize(raw_x: &DMatrix<f64>, y: &DVector<f64>) -> Result<Design, SolverError> {
    let (n, d) = raw_x.shape();
    if n < 2 {
        return Err(SolverError::TooFewRows(n));
    }
    if d == 0 {
        return Err(SolverError::NoPredictors);
    }
    if y.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, found: y.len() });
    }
    if raw_x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(SolverError::NonFinite);
    }
    let mut x = DMatrix::zeros(n, d + 1);
    x.column_mut(0).fill(1.0);
    let mut means = Vec::with_capacity(d);
    let mut scales = Vec::with_capacity(d);
    for j in 0..d {
        let col = raw_x.column(j);
        let mean = col.sum() / n as f64;
        let norm = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>().sqrt();
        let magnitude = col.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if !(norm > 1e-12 * magnitude.max(f64::MIN_POSITIVE) * (n as f64).sqrt()) {
            return Err(SolverError::ZeroVariance { column: j });
        }
        for (dst, v) in x.column_mut(j + 1).iter_mut().zip(col.iter()) {
            *dst = (v - mean) / norm;
        }
        means.push(mean);
        scales.push(norm);
    }
    let mut col_sq_norms = vec![1.0; d + 1];
    col_sq_norms[0] = n as f64;
    Ok(Design { x, y: y.clone(), col_sq_norms, standardization: Standardization { means, scales } })
}

impl Design {
    /// Number of observations.
    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    /// Number of predictors (slopes), excluding the intercept.
    pub fn d(&self) -> usize {
        self.x.ncols() - 1
    }

    /// Full `n x (d+1)` matrix including the intercept column.
    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn standardization(&self) -> &Standardization {
        &self.standardization
    }

    /// Column `j` of the full matrix (`0` is the intercept).
    pub(crate) fn column(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.x.as_slice()[j * n..(j + 1) * n]
    }

    pub(crate) fn col_sq_norm(&self, j: usize) -> f64 {
        self.col_sq_norms[j]
    }

    /// Same predictors with a new response vector.
    pub fn with_response(&self, y: DVector<f64>) -> Result<Design, SolverError> {
        if y.len() != self.n() {
            return Err(SolverError::DimensionMismatch { expected: self.n(), found: y.len() });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(SolverError::NonFinite);
        }
        Ok(Design { y, ..self.clone() })
    }

    /// Rows `rows` of this design. Columns are not re-standardized.
    pub fn subset_rows(&self, rows: &[usize]) -> Design {
        let x = self.x.select_rows(rows.iter());
        let y = self.y.select_rows(rows.iter());
        let col_sq_norms = (0..x.ncols()).map(|j| x.column(j).norm_squared()).collect();
        Design { x, y, col_sq_norms, standardization: self.standardization.clone() }
    }

    pub fn fitted(&self, coefs: &Coefficients) -> DVector<f64> {
        &self.x * coefs.theta()
    }

    pub fn residuals(&self, coefs: &Coefficients) -> DVector<f64> {
        &self.y - self.fitted(coefs)
    }

    pub fn rss(&self, coefs: &Coefficients) -> f64 {
        self.residuals(coefs).norm_squared()
    }

    /// Applies the stored standardization to raw predictors and prepends ones.
    pub fn transform(&self, raw_x: &DMatrix<f64>) -> Result<DMatrix<f64>, SolverError> {
        let d = self.d();
        if raw_x.ncols() != d {
            return Err(SolverError::DimensionMismatch { expected: d, found: raw_x.ncols() });
        }
        let m = raw_x.nrows();
        let Standardization { means, scales } = &self.standardization;
        Ok(DMatrix::from_fn(m, d + 1, |a, j| {
            if j == 0 {
                1.0
            } else {
                (raw_x[(a, j - 1)] - means[j - 1]) / scales[j - 1]
            }
        }))
    }

    /// Maps standardized-scale coefficients to `(intercept, slopes)` on the raw scale.
    pub fn raw_coefficients(&self, coefs: &Coefficients) -> (f64, Vec<f64>) {
        let Standardization { means, scales } = &self.standardization;
        let theta = coefs.theta();
        let slopes: Vec<f64> = (0..self.d()).map(|j| theta[j + 1] / scales[j]).collect();
        let shift: f64 = slopes.iter().zip(means).map(|(b, m)| b * m).sum();
        (theta[0] - shift, slopes)
    }
}

/// Predicts responses for raw predictors `new_x` using the standardization of `design`.
pub fn predict(coefs: &Coefficients, new_x: &DMatrix<f64>, design: &Design) -> Result<DVector<f64>, SolverError> {
    if coefs.d() != design.d() {
        return Err(SolverError::DimensionMismatch { expected: design.d(), found: coefs.d() });
    }
    Ok(design.transform(new_x)? * coefs.theta())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardizes_simple_column() {
        let raw = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let y = DVector::from_vec(vec![0.0, 1.0, 2.0]);
        let design = standardize(&raw, &y).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let col = design.column(1);
        assert!((col[0] + s).abs() < 1e-15);
        assert!(col[1].abs() < 1e-15);
        assert!((col[2] - s).abs() < 1e-15);
        assert_eq!(design.column(0), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn standardize_is_idempotent() {
        let raw = DMatrix::from_fn(7, 3, |i, j| ((i * 5 + j * 3) % 7) as f64 + 0.1 * j as f64);
        let y = DVector::from_fn(7, |i, _| i as f64);
        let once = standardize(&raw, &y).unwrap();
        let slopes = once.x().columns(1, 3).into_owned();
        let twice = standardize(&slopes, &y).unwrap();
        assert!((once.x() - twice.x()).amax() < 1e-12);
    }

    #[test]
    fn rejects_constant_column() {
        let raw = DMatrix::from_fn(4, 2, |i, j| if j == 1 { 5.0 } else { i as f64 });
        let y = DVector::zeros(4);
        assert_eq!(standardize(&raw, &y), Err(SolverError::ZeroVariance { column: 1 }));
    }

    #[test]
    fn rejects_bad_shapes() {
        let y = DVector::zeros(1);
        assert_eq!(standardize(&DMatrix::zeros(1, 1), &y), Err(SolverError::TooFewRows(1)));
        let raw = DMatrix::from_fn(3, 1, |i, _| i as f64);
        assert!(matches!(
            standardize(&raw, &DVector::zeros(2)),
            Err(SolverError::DimensionMismatch { .. })
        ));
        let mut bad = raw.clone();
        bad[(0, 0)] = f64::NAN;
        assert_eq!(standardize(&bad, &DVector::zeros(3)), Err(SolverError::NonFinite));
    }

    #[test]
    fn predict_round_trips_training_data() {
        let raw = DMatrix::from_fn(6, 2, |i, j| (i as f64).powi(j as i32 + 1));
        let y = DVector::from_fn(6, |i, _| 2.0 * i as f64 - 1.0);
        let design = standardize(&raw, &y).unwrap();
        let coefs = Coefficients::new(DVector::from_vec(vec![0.3, -1.2, 0.8]));
        let pred = predict(&coefs, &raw, &design).unwrap();
        assert!((pred - design.fitted(&coefs)).amax() < 1e-12);
        // raw-scale coefficients reproduce the same predictions
        let (b0, b) = design.raw_coefficients(&coefs);
        for a in 0..6 {
            let direct = b0 + b[0] * raw[(a, 0)] + b[1] * raw[(a, 1)];
            assert!((direct - design.fitted(&coefs)[a]).abs() < 1e-10);
        }
    }

    #[test]
    fn predict_zero_slopes_is_constant() {
        let raw = DMatrix::from_fn(5, 2, |i, j| (i + 2 * j) as f64 * if j == 1 { -1.0 } else { 1.5 } + (i * i) as f64);
        let design = standardize(&raw, &DVector::zeros(5)).unwrap();
        let coefs = Coefficients::new(DVector::from_vec(vec![4.5, 0.0, 0.0]));
        let new_x = DMatrix::from_fn(3, 2, |i, j| (i * 10 + j) as f64);
        let pred = predict(&coefs, &new_x, &design).unwrap();
        assert!(pred.iter().all(|&p| p == 4.5));
        assert!(predict(&coefs, &DMatrix::zeros(3, 3), &design).is_err());
    }

    #[test]
    fn single_predictor_identity() {
        let raw = DMatrix::from_column_slice(4, 1, &[0.0, 1.0, 3.0, 8.0]);
        let design = standardize(&raw, &DVector::zeros(4)).unwrap();
        let coefs = Coefficients::new(DVector::from_vec(vec![0.0, 1.0]));
        let pred = predict(&coefs, &raw, &design).unwrap();
        for a in 0..4 {
            assert!((pred[a] - design.column(1)[a]).abs() < 1e-15);
        }
    }

    #[test]
    fn subset_rows_tracks_norms() {
        let raw = DMatrix::from_fn(10, 2, |i, j| ((i * 7 + j * 3) % 10) as f64);
        let design = standardize(&raw, &DVector::from_fn(10, |i, _| i as f64)).unwrap();
        let sub = design.subset_rows(&[0, 2, 4, 6]);
        assert_eq!(sub.n(), 4);
        assert_eq!(sub.col_sq_norm(0), 4.0);
        let expect: f64 = sub.column(1).iter().map(|v| v * v).sum();
        assert_eq!(sub.col_sq_norm(1), expect);
        assert_eq!(sub.y()[1], 2.0);
    }
}
