//! Schmidt decomposition of bipartite pure states.

use super::{CMatrix, StateVector, C64};
use crate::error::{Error, Result};

/// `psi = sum_i c_i chi_i (x) phi_i` with nonnegative coefficients in
/// descending order, orthonormal `chi_i` in the first factor and orthonormal
/// `phi_i` in the second.
#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Nonnegative, descending; the squares sum to 1.
    pub coefficients: Vec<f64>,
    /// d1 x r, orthonormal columns.
    pub left_basis: CMatrix,
    /// d2 x r, orthonormal columns.
    pub right_system: CMatrix,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// Rebuilds the bipartite state vector (row-major index `i * d2 + j`).
    pub fn reconstruct(&self) -> super::CVector {
        let d1 = self.left_basis.nrows();
        let d2 = self.right_system.nrows();
        let mut v = super::CVector::zeros(d1 * d2);
        for (k, &c) in self.coefficients.iter().enumerate() {
            for i in 0..d1 {
                for j in 0..d2 {
                    v[i * d2 + j] +=
                        C64::new(c, 0.0) * self.left_basis[(i, k)] * self.right_system[(j, k)];
                }
            }
        }
        v
    }
}

/// Computes the Schmidt decomposition of `psi` for the split `d1 x d2`.
///
/// Coefficients below `1e-14` are dropped, so the rank equals the numerical
/// Schmidt rank.
pub fn schmidt(psi: &StateVector, d1: usize, d2: usize) -> Result<SchmidtDecomposition> {
    if psi.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            got: psi.dim(),
        });
    }
    // reshape into the d1 x d2 coefficient matrix M[i, j] = psi[i * d2 + j]
    let v = psi.as_vector();
    let m = CMatrix::from_fn(d1, d2, |i, j| v[i * d2 + j]);
    let svd = m.svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let vt = svd.v_t.expect("right singular vectors requested");

    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .unwrap()
    });

    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&k| svd.singular_values[k] > 1e-14)
        .collect();
    let r = kept.len();
    let mut coefficients = Vec::with_capacity(r);
    let mut left = CMatrix::zeros(d1, r);
    let mut right = CMatrix::zeros(d2, r);
    for (col, &k) in kept.iter().enumerate() {
        coefficients.push(svd.singular_values[k]);
        left.set_column(col, &u.column(k));
        // right factor must satisfy M = sum c_k (left_k) (right_k)^T, so the
        // right system is the unconjugated transpose row of V^H
        for j in 0..d2 {
            right[(j, col)] = vt[(k, j)];
        }
    }
    Ok(SchmidtDecomposition {
        coefficients,
        left_basis: left,
        right_system: right,
    })
}
