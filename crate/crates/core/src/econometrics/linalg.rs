use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Relative residual norm below which a column counts as a combination of
/// the columns before it.
const COLLINEAR_TOL: f64 = 1e-9;

/// Names of the columns of `x` that are linearly dependent on earlier
/// columns, found by modified Gram-Schmidt.
pub(crate) fn collinear_columns(x: &DMatrix<f64>, names: &[String]) -> Vec<String> {
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut bad = Vec::new();
    for j in 0..x.ncols() {
        let col = x.column(j).into_owned();
        let norm0 = col.norm();
        let mut v = col;
        for q in &basis {
            let c = q.dot(&v);
            v.axpy(-c, q, 1.0);
        }
        let norm = v.norm();
        if norm0 == 0.0 || norm <= COLLINEAR_TOL * norm0 {
            bad.push(names[j].clone());
        } else {
            basis.push(v / norm);
        }
    }
    bad
}

/// Least squares `x·b ≈ y` with the inverse cross-product matrix, failing
/// with the collinear column names when `x` lacks full column rank.
pub(crate) fn ols(x: &DMatrix<f64>, y: &DVector<f64>, names: &[String]) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let bad = collinear_columns(x, names);
    if !bad.is_empty() {
        return Err(Error::RankDeficient { columns: bad });
    }
    let xtx = x.transpose() * x;
    let chol = xtx
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Factorization("cross-product matrix is not positive definite".into()))?;
    let beta = chol.solve(&(x.transpose() * y));
    Ok((beta, chol.inverse()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(k: usize) -> Vec<String> {
        (0..k).map(|j| format!("x{j}")).collect()
    }

    #[test]
    fn exact_fit() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let (b, _) = ols(&x, &y, &names(2)).unwrap();
        assert!((b[0] - 1.0).abs() < 1e-12 && (b[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn reports_dependent_columns() {
        let x = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.0, 1.0, 2.0, 0.0, 2.0, 4.0, 0.0]);
        match ols(&x, &DVector::zeros(3), &names(3)) {
            Err(Error::RankDeficient { columns }) => assert_eq!(columns, vec!["x1", "x2"]),
            other => panic!("{other:?}"),
        }
    }
}
