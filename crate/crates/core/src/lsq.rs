//! Dense linear least squares used by the material and deflection fits.

use nalgebra::{DMatrix, DVector};

/// Condition-number threshold above which a design matrix is treated as rank deficient.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub coefficients: Vec<f64>,
    /// Euclidean norm of `A x - b`.
    pub residual_norm: f64,
    /// Ratio of largest to smallest singular value of the design matrix.
    pub condition: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankDeficiency {
    pub rows: usize,
    pub cols: usize,
    pub condition: f64,
}

/// Solves `min ||A x - b||` by Householder QR after checking the conditioning of `A`.
pub fn solve(design: &DMatrix<f64>, rhs: &DVector<f64>, max_condition: f64) -> Result<LsqSolution, RankDeficiency> {
    let (rows, cols) = design.shape();
    if rows < cols || cols == 0 {
        return Err(RankDeficiency { rows, cols, condition: f64::INFINITY });
    }
    let condition = condition_number(design);
    if !condition.is_finite() || condition > max_condition {
        return Err(RankDeficiency { rows, cols, condition });
    }

    let qr = design.clone().qr();
    let qtb = qr.q().transpose() * rhs;
    let x = qr.r().solve_upper_triangular(&qtb).ok_or(RankDeficiency { rows, cols, condition })?;
    let residual_norm = (design * &x - rhs).norm();

    Ok(LsqSolution { coefficients: x.iter().copied().collect(), residual_norm, condition })
}

pub fn condition_number(design: &DMatrix<f64>) -> f64 {
    let sv = design.singular_values();
    let max = sv.iter().copied().fold(0.0_f64, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line_fit() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0, 3.0, 5.0]);
        let sol = solve(&a, &b, MAX_CONDITION).unwrap();
        assert!((sol.coefficients[0] - 1.0).abs() < 1e-12);
        assert!((sol.coefficients[1] - 2.0).abs() < 1e-12);
        assert!(sol.residual_norm < 1e-12);
    }

    #[test]
    fn underdetermined_is_rejected() {
        let a = DMatrix::from_row_slice(1, 2, &[1.0, 2.0]);
        let b = DVector::from_vec(vec![1.0]);
        assert!(solve(&a, &b, MAX_CONDITION).is_err());
    }

    #[test]
    fn collinear_columns_are_rejected() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let b = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let err = solve(&a, &b, MAX_CONDITION).unwrap_err();
        assert!(err.condition > MAX_CONDITION);
    }
}
