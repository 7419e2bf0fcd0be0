//! Hermitian eigendecomposition with a canonical ascending order.

use super::{CMatrix, CVector, C64};

/// Eigenpairs of a Hermitian operator: ascending real eigenvalues and the
/// matching orthonormal eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Rebuilds `V diag(lambda) V*`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = self.dim();
        let lam = CMatrix::from_diagonal(&CVector::from_iterator(
            d,
            self.eigenvalues.iter().map(|&x| C64::new(x, 0.0)),
        ));
        &self.eigenvectors * lam * self.eigenvectors.adjoint()
    }

    /// `f(A) = V diag(f(lambda)) V*` for a real function of the spectrum.
    pub fn apply_function(&self, f: impl Fn(f64) -> C64) -> CMatrix {
        let d = self.dim();
        let lam = CMatrix::from_diagonal(&CVector::from_iterator(
            d,
            self.eigenvalues.iter().map(|&x| f(x)),
        ));
        &self.eigenvectors * lam * self.eigenvectors.adjoint()
    }
}

/// Decomposes a Hermitian matrix. Diagonal inputs take a direct path (sort
/// the diagonal, permute identity columns), which keeps large decoupled
/// Hamiltonians cheap; everything else goes through the dense solver.
pub(crate) fn decompose(m: &CMatrix) -> SpectralDecomposition {
    let d = m.nrows();
    let scale = m.iter().fold(0.0f64, |a, z| a.max(z.norm())).max(1.0);
    let mut off = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                off = off.max(m[(i, j)].norm());
            }
        }
    }
    if off <= 1e-15 * scale {
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| m[(a, a)].re.partial_cmp(&m[(b, b)].re).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| m[(i, i)].re).collect();
        let mut vecs = CMatrix::zeros(d, d);
        for (col, &i) in order.iter().enumerate() {
            vecs[(i, col)] = C64::new(1.0, 0.0);
        }
        return SpectralDecomposition {
            eigenvalues,
            eigenvectors: vecs,
        };
    }

    let se = nalgebra::linalg::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = CMatrix::zeros(d, d);
    for (col, &i) in order.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    SpectralDecomposition {
        eigenvalues,
        eigenvectors: vecs,
    }
}

#[cfg(test)]
mod tests {
    use super::super::{haar_unitary, DensityMatrix, HermitianOperator, RngStream};
    use super::*;

    #[test]
    fn identity_over_two_is_degenerate() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        let s = rho.spectral().unwrap();
        assert!((s.eigenvalues[0] - 0.5).abs() < 1e-14);
        assert!((s.eigenvalues[1] - 0.5).abs() < 1e-14);
        let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
        assert!((gram - CMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_input_keeps_standard_basis() {
        let rho = DensityMatrix::from_diagonal(&[0.2, 0.8]).unwrap();
        let s = rho.spectral().unwrap();
        assert_eq!(s.eigenvalues, vec![0.2, 0.8]);
        assert!((s.eigenvectors[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((s.eigenvectors[(1, 1)] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn construct_then_decompose_round_trip() {
        let mut rng = RngStream::new(11, 0);
        let v = haar_unitary(4, &mut rng);
        let p = [0.1, 0.2, 0.3, 0.4];
        let rho = DensityMatrix::from_eigensystem(&p, v.as_matrix()).unwrap();
        let s = rho.spectral().unwrap();
        for (got, want) in s.eigenvalues.iter().zip(p.iter()) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
        let rec = s.reconstruct();
        assert!((rec - rho.as_matrix()).norm() < 1e-10);
    }

    #[test]
    fn reconstruction_across_dims() {
        let mut rng = RngStream::new(12, 0);
        for &d in &[2usize, 3, 8, 17, 64] {
            let u = haar_unitary(d, &mut rng);
            use rand::Rng;
            let levels: Vec<f64> = (0..d).map(|_| 4.0 * rng.gen::<f64>() - 2.0).collect();
            let mut m = CMatrix::zeros(d, d);
            for (k, &e) in levels.iter().enumerate() {
                let col = u.as_matrix().column(k);
                for i in 0..d {
                    for j in 0..d {
                        m[(i, j)] += C64::new(e, 0.0) * col[i] * col[j].conj();
                    }
                }
            }
            let h = HermitianOperator::new(m.clone()).unwrap();
            let s = h.spectral();
            let norm = m.norm().max(1.0);
            assert!((s.reconstruct() - &m).norm() <= 1e-10 * norm, "d = {d}");
            let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
            assert!((gram - CMatrix::identity(d, d)).norm() < 1e-10);
            for w in s.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
        }
    }
}
