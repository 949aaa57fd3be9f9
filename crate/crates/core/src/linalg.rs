//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

/// Least-squares solution of `a x ≈ b` through column-pivoted QR.
///
/// Returns the solution together with the Euclidean norm of the residual
/// `b - a x`. `a` must have at least as many rows as columns.
pub(crate) fn least_squares(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<(DVector<f64>, f64)> {
    debug_assert!(a.nrows() >= a.ncols());
    if a.ncols() == 0 {
        return Some((DVector::zeros(0), b.norm()));
    }
    let qr = a.clone().col_piv_qr();
    let q = qr.q();
    let r = qr.r();
    let qtb = q.transpose() * b;
    let mut x = r.solve_upper_triangular(&qtb)?;
    qr.p().inv_permute_rows(&mut x);
    if x.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let residual = (b - a * &x).norm();
    Some((x, residual))
}

/// Solves the square system `a x = b` by LU with partial pivoting, after
/// equilibrating the columns of `a` to unit max-norm.
pub(crate) fn solve_square(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let (scaled, scale) = equilibrate_columns(a);
    let y = scaled.lu().solve(b)?;
    let x = y.component_mul(&scale);
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Solves `a X = b` for a matrix right-hand side, factoring `a` once.
pub(crate) fn solve_square_matrix(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let (scaled, scale) = equilibrate_columns(a);
    let mut y = scaled.lu().solve(b)?;
    for (mut row, s) in y.row_iter_mut().zip(scale.iter()) {
        row *= *s;
    }
    y.iter().all(|v| v.is_finite()).then_some(y)
}

/// Solves `a^T x = b` for square `a`; used for weight extraction where the
/// right-hand side is a unit vector.
pub(crate) fn solve_transposed(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    // (A D)^T x = D A^T x; dividing b by the scale recovers A^T x = b.
    let (scaled, scale) = equilibrate_columns(a);
    let rhs = b.component_mul(&scale);
    let x = scaled.transpose().lu().solve(&rhs)?;
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// 2-norm condition number, infinite when singular.
pub(crate) fn condition_number(a: &DMatrix<f64>) -> f64 {
    if a.is_empty() {
        return 1.0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn equilibrate_columns(a: &DMatrix<f64>) -> (DMatrix<f64>, DVector<f64>) {
    let mut scaled = a.clone();
    let mut scale = DVector::from_element(a.ncols(), 1.0);
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        let m = col.amax();
        if m > 0.0 && m.is_finite() {
            col /= m;
            scale[j] = 1.0 / m;
        }
    }
    (scaled, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn least_squares_recovers_consistent_solution() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let b = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let (x, res) = least_squares(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn least_squares_reports_residual_of_inconsistent_system() {
        let a = DMatrix::from_row_slice(3, 1, &[1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![0.0, 0.0, 3.0]);
        let (x, res) = least_squares(&a, &b).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((res - 6.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn least_squares_with_pivoting_permutes_back() {
        // Large second column forces a pivot swap.
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 100.0, 2.0, -50.0, 3.0, 7.0]);
        let x0 = DVector::from_vec(vec![0.25, -3.0]);
        let b = &a * &x0;
        let (x, res) = least_squares(&a, &b).unwrap();
        assert!((x - x0).norm() < 1e-12);
        assert!(res < 1e-10);
    }

    #[test]
    fn transposed_solve_matches_direct() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1e4, 1.0, -2e4]);
        let b = DVector::from_vec(vec![1.0, 0.0]);
        let x = solve_transposed(&a, &b).unwrap();
        assert!((a.transpose() * x - &b).norm() < 1e-12);
        assert!(solve_square(&DMatrix::zeros(2, 2), &b).is_none());
    }
}
