// SPDX-License-Identifier: MIT OR Apache-2.0

//! Dense symmetric linear algebra: just enough for covariance work.
//!
//! Matrices are stored row-major in a flat `Vec<f64>`. Sizes here are the
//! series lengths of the statistical procedures (hundreds to a few
//! thousand), so simple loops are adequate.

use crate::error::{Error, Result};

/// Lower-triangular Cholesky factor L with A = L·Lᵀ, stored packed:
/// row i holds entries (i,0)..=(i,i).
#[derive(Debug, Clone)]
pub(crate) struct LowerTriangular {
    pub n: usize,
    rows: Vec<f64>,
}

impl LowerTriangular {
    #[inline]
    fn row_start(i: usize) -> usize {
        i * (i + 1) / 2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        debug_assert!(j <= i && i < self.n);
        self.rows[Self::row_start(i) + j]
    }

    /// Row i as a slice of its (i+1) stored entries.
    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[Self::row_start(i)..Self::row_start(i) + i + 1]
    }

    /// y = L·x.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(&x[..=i])
                    .map(|(l, xi)| l * xi)
                    .sum()
            })
            .collect()
    }
}

/// Cholesky factorization of a symmetric matrix given row-major.
///
/// Fails with the index of the offending leading minor when the matrix is
/// not (numerically) positive definite.
pub(crate) fn cholesky(a: &[f64], n: usize) -> Result<LowerTriangular> {
    debug_assert_eq!(a.len(), n * n);
    let mut rows = vec![0.0; n * (n + 1) / 2];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            let ri = LowerTriangular::row_start(i);
            let rj = LowerTriangular::row_start(j);
            for k in 0..j {
                sum -= rows[ri + k] * rows[rj + k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(Error::numerical(format!(
                        "Cholesky breakdown at leading minor {} (pivot {sum:e})",
                        i + 1
                    )));
                }
                rows[ri + j] = sum.sqrt();
            } else {
                rows[ri + j] = sum / rows[rj + j];
            }
        }
    }
    Ok(LowerTriangular { n, rows })
}

/// Whether all eigenvalues of symmetric `a` exceed `-shift`, decided by a
/// Cholesky attempt on `a + shift·I`. Used as the positive semi-definite
/// check with a small tolerance shift.
pub(crate) fn is_psd_within(a: &[f64], n: usize, shift: f64) -> bool {
    let mut shifted = a.to_vec();
    for i in 0..n {
        shifted[i * n + i] += shift;
    }
    cholesky(&shifted, n).is_ok()
}

/// Solve the symmetric positive-definite system A·x = b.
pub(crate) fn solve_spd(a: &[f64], b: &[f64], n: usize) -> Result<Vec<f64>> {
    let l = cholesky(a, n)?;
    // Forward L·y = b.
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for j in 0..i {
            sum -= l.get(i, j) * y[j];
        }
        y[i] = sum / l.get(i, i);
    }
    // Backward Lᵀ·x = y.
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for j in (i + 1)..n {
            sum -= l.get(j, i) * x[j];
        }
        x[i] = sum / l.get(i, i);
    }
    Ok(x)
}
