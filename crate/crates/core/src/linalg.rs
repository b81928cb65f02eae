//! Small dense linear algebra, delegated to nalgebra in `f64`.
//!
//! Matrices here are at most 12×12. Values are widened to `f64`, which is
//! exact for both supported scalars, and narrowed back on return.

use nalgebra::DMatrix;

use crate::error::{GeomError, Result};
use crate::scalar::Real;

pub type Matrix<T> = Vec<Vec<T>>;

fn to_na<T: Real>(a: &[Vec<T>]) -> DMatrix<f64> {
    let r = a.len();
    let c = a.first().map_or(0, |row| row.len());
    DMatrix::from_fn(r, c, |i, j| a[i][j].as_f64())
}

fn from_na<T: Real>(m: &DMatrix<f64>) -> Matrix<T> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| T::lit(m[(i, j)])).collect())
        .collect()
}

pub fn identity<T: Real>(n: usize) -> Matrix<T> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { T::one() } else { T::zero() })
                .collect()
        })
        .collect()
}

pub fn matmul<T: Real>(a: &[Vec<T>], b: &[Vec<T>]) -> Matrix<T> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

pub fn matvec<T: Real>(a: &[Vec<T>], v: &[T]) -> Vec<T> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| *x * *y).sum())
        .collect()
}

pub fn transpose<T: Real>(a: &[Vec<T>]) -> Matrix<T> {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

/// Inverse via LU; fails when the matrix is numerically singular.
pub fn inverse<T: Real>(a: &[Vec<T>]) -> Result<Matrix<T>> {
    let m = to_na(a);
    m.clone()
        .try_inverse()
        .map(|inv| from_na(&inv))
        .ok_or(GeomError::SingularBasis { sigma_min: 0.0 })
}

pub fn determinant<T: Real>(a: &[Vec<T>]) -> T {
    T::lit(to_na(a).determinant())
}

/// Solves `a · x = b`.
pub fn solve<T: Real>(a: &[Vec<T>], b: &[T]) -> Result<Vec<T>> {
    let m = to_na(a);
    let rhs = nalgebra::DVector::from_iterator(b.len(), b.iter().map(|v| v.as_f64()));
    m.lu()
        .solve(&rhs)
        .map(|x| x.iter().map(|v| T::lit(*v)).collect())
        .ok_or(GeomError::SingularBasis { sigma_min: 0.0 })
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues<T: Real>(a: &[Vec<T>]) -> Vec<T> {
    let mut ev: Vec<f64> = to_na(a).symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev.into_iter().map(T::lit).collect()
}

pub fn singular_values<T: Real>(a: &[Vec<T>]) -> Vec<T> {
    let mut sv: Vec<f64> = to_na(a).singular_values().iter().copied().collect();
    sv.sort_by(|x, y| x.total_cmp(y));
    sv.into_iter().map(T::lit).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_and_solve() {
        let a = vec![vec![2.0, 1.0], vec![1.0, 3.0]];
        let inv = inverse(&a).unwrap();
        let p: Matrix<f64> = matmul(&a, &inv);
        for i in 0..2 {
            for j in 0..2 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p[i][j] - e).abs() < 1e-14);
            }
        }
        let x: Vec<f64> = solve(&a, &[3.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
        assert!((determinant(&a) - 5.0f64).abs() < 1e-14);
    }

    #[test]
    fn singular_is_rejected() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert!(inverse(&a).is_err());
    }

    #[test]
    fn eigen_and_singular_values_sorted() {
        let a = vec![vec![2.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(symmetric_eigenvalues(&a), vec![1.0, 2.0]);
        let s: Vec<f64> = singular_values(&[vec![0.0, -3.0], vec![1.0, 0.0]]);
        assert!((s[0] - 1.0).abs() < 1e-14 && (s[1] - 3.0).abs() < 1e-14);
    }
}
