//! Diagonalization of a user-supplied linear part.
//!
//! Supporting plumbing only: the pipeline itself consumes maps already in
//! eigen-coordinates. Restricted to small matrices.

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Spectrum;
use crate::error::{Error, Result};

pub const MAX_EIGEN_DIM: usize = 16;

/// Default bound on the eigenvector-matrix condition number.
pub const DEFAULT_MAX_CONDITION: f64 = 1e8;

/// `A = V·diag(λ)·V⁻¹` with unit-norm eigenvector columns in `V`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Eigencoordinates {
    pub spectrum: Spectrum,
    /// Row-major eigenvector matrix; column `i` is `eᵢ`.
    pub v: Vec<Vec<Complex64>>,
    pub v_inv: Vec<Vec<Complex64>>,
    /// 2-norm condition number of `V`.
    pub condition: f64,
}

fn to_rows(m: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Eigen-decomposition of a square complex matrix given row-major.
///
/// Defective or nearly defective matrices (condition of `V` above
/// `max_condition`) are rejected.
pub fn eigencoordinates(a: &[Vec<Complex64>], max_condition: f64) -> Result<Eigencoordinates> {
    let n = a.len();
    if n == 0 || n > MAX_EIGEN_DIM {
        return Err(Error::InvalidArgument(format!(
            "eigen-decomposition supports 1 <= n <= {MAX_EIGEN_DIM}, got {n}"
        )));
    }
    if let Some(row) = a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: row.len(),
        });
    }
    if a.iter().flatten().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    let m = DMatrix::from_fn(n, n, |i, j| a[i][j]);

    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)));
    if diagonal {
        let lambdas = (0..n).map(|i| m[(i, i)]).collect();
        let id = to_rows(&DMatrix::identity(n, n));
        return Ok(Eigencoordinates {
            spectrum: Spectrum::new(lambdas)?,
            v: id.clone(),
            v_inv: id,
            condition: 1.0,
        });
    }

    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000)
        .ok_or_else(|| Error::InvalidArgument("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let lambdas: Vec<Complex64> = (0..n).map(|i| t[(i, i)]).collect();

    // Eigenvectors of the triangular factor by back substitution; tiny
    // pivots are clamped so that repeated eigenvalues blow up the
    // condition number instead of dividing by zero.
    let small = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
    let mut y = DMatrix::<Complex64>::zeros(n, n);
    for k in 0..n {
        y[(k, k)] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let s: Complex64 = (i + 1..=k).map(|j| t[(i, j)] * y[(j, k)]).sum();
            let mut d = t[(i, i)] - t[(k, k)];
            if d.norm() < small {
                d = Complex64::new(small, 0.0);
            }
            y[(i, k)] = -s / d;
        }
    }
    let mut v = q * y;
    for mut col in v.column_iter_mut() {
        let norm = col.norm();
        col /= Complex64::new(norm, 0.0);
    }

    let condition = condition_number(&v);
    if condition.is_nan() || condition > max_condition {
        return Err(Error::Defective { condition });
    }
    let v_inv = v.clone().try_inverse().ok_or(Error::Defective {
        condition: f64::INFINITY,
    })?;

    Ok(Eigencoordinates {
        spectrum: Spectrum::new(lambdas)?,
        v: to_rows(&v),
        v_inv: to_rows(&v_inv),
        condition,
    })
}
