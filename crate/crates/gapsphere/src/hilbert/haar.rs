//! Haar-random unitaries and orthonormal systems.

use super::{check_dim, CMatrix, OrthonormalSystem, RngStream, UnitaryMatrix, C64};
use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;

pub(crate) fn ginibre(rows: usize, cols: usize, rng: &mut RngStream) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

// QR of a Ginibre matrix with the R diagonal rotated to the positive real
// axis. Without the phase correction the factorization convention leaks into
// the distribution and the result is not Haar.
fn haar_columns(m: usize, k: usize, rng: &mut RngStream) -> CMatrix {
    let g = ginibre(m, k, rng);
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..k {
        let d = r[(j, j)];
        let phase = if d.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            d / C64::new(d.norm(), 0.0)
        };
        // multiply column j by conj(phase) so that R_jj becomes real positive
        let correction = phase.conj();
        for i in 0..m {
            q[(i, j)] *= correction;
        }
    }
    q
}

/// Draws a d x d unitary from the Haar measure on U(d).
pub fn haar_unitary(d: usize, rng: &mut RngStream) -> UnitaryMatrix {
    check_dim(d).expect("dimension within cap");
    UnitaryMatrix::new_unchecked(haar_columns(d, d, rng))
}

/// Draws k orthonormal vectors in C^m distributed as the first k columns of
/// a Haar unitary (the uniform measure on the Stiefel manifold).
pub fn haar_orthonormal_system(m: usize, k: usize, rng: &mut RngStream) -> Result<OrthonormalSystem> {
    check_dim(m)?;
    if k == 0 {
        return Err(Error::EmptyDimension);
    }
    if k > m {
        return Err(Error::SystemTooLarge { k, m });
    }
    Ok(OrthonormalSystem::new_unchecked(haar_columns(m, k, rng)))
}
