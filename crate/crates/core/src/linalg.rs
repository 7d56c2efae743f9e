//! Dense least squares via Householder QR, with rank detection.

use nalgebra::{DMatrix, DVector};

/// Relative size below which an `R` diagonal entry marks a dependent column.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is rank deficient; columns {columns:?} are linear combinations of earlier columns")]
    RankDeficient { columns: Vec<usize> },
    #[error("least squares needs at least as many rows ({rows}) as columns ({cols})")]
    Underdetermined { rows: usize, cols: usize },
}

/// Solves `min ||a x - b||` for a full-column-rank `a`.
pub fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>, LinalgError> {
    let (rows, cols) = a.shape();
    if rows < cols {
        return Err(LinalgError::Underdetermined { rows, cols });
    }
    if cols == 0 {
        return Ok(DVector::zeros(0));
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let scale = (0..cols).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    let dependent: Vec<usize> =
        (0..cols).filter(|&i| !(r[(i, i)].abs() > RANK_TOL * scale)).collect();
    if !dependent.is_empty() {
        return Err(LinalgError::RankDeficient { columns: dependent });
    }
    let qtb = qr.q().transpose() * b;
    Ok(r.solve_upper_triangular(&qtb).expect("nonsingular triangular factor"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_overdetermined_system() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let x = least_squares(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reports_dependent_column() {
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 1.0, 2.0, 1.0, 2.0, 3.0, 1.0, 3.0, 4.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        match least_squares(&a, &b) {
            Err(LinalgError::RankDeficient { columns }) => assert_eq!(columns, vec![2]),
            other => panic!("unexpected {other:?}"),
        }
    }
}
