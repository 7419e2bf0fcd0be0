//! Conditional wave functions, reduced density matrices, and the uniform
//! measures on constrained sets of composite states.
//!
//! A composite pure state `psi` in `C^{d1} (x) C^{d2}` is stored row-major:
//! entry `i * d2 + j` is the amplitude of `|i> (x) |j>`. The conditional wave
//! function contracts `psi` with a random basis vector of the second factor,
//! normalized, with the basis vector chosen by its quantum probability.

use crate::error::{Error, Result};
use crate::hilbert::{
    check_dim, haar_orthonormal_system, project_to_sphere, schmidt, CMatrix, CVector,
    DensityMatrix, HermitianOperator, OrthonormalSystem, RngStream, StateVector, UnitaryMatrix,
    C64, RANK_TOL,
};
use rand::Rng;
use rand_distr::StandardNormal;

/// Probabilities at or below this are treated as zero and the corresponding
/// basis index is excluded from conditional ensembles.
pub const ZERO_PROBABILITY_TOL: f64 = 1e-24;

/// Subsystem dimensions of a bipartite split; `d1 * d2` is capped at the
/// dense-algebra limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BipartiteSplit {
    d1: usize,
    d2: usize,
}

impl BipartiteSplit {
    pub fn new(d1: usize, d2: usize) -> Result<Self> {
        if d1 == 0 || d2 == 0 {
            return Err(Error::EmptyDimension);
        }
        check_dim(d1 * d2)?;
        Ok(BipartiteSplit { d1, d2 })
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    pub fn total(&self) -> usize {
        self.d1 * self.d2
    }

    fn check(&self, psi: &StateVector) -> Result<()> {
        if psi.dim() != self.total() {
            return Err(Error::DimensionMismatch {
                expected: self.total(),
                got: psi.dim(),
            });
        }
        Ok(())
    }
}

/// Partial trace over the second factor: `tr_2 |psi><psi|`.
pub fn reduced_density(psi: &StateVector, split: BipartiteSplit) -> Result<DensityMatrix> {
    split.check(psi)?;
    let (d1, d2) = (split.d1, split.d2);
    let v = psi.as_vector();
    let mut m = CMatrix::zeros(d1, d1);
    for q2 in 0..d2 {
        for i in 0..d1 {
            let a = v[i * d2 + q2];
            for j in 0..d1 {
                m[(i, j)] += a * v[j * d2 + q2].conj();
            }
        }
    }
    DensityMatrix::new(m)
}

/// One conditional draw: the sampled environment index, the normalized
/// conditional wave function, and the probability of that index.
#[derive(Debug, Clone)]
pub struct ConditionalDraw {
    pub q2: usize,
    pub psi1: StateVector,
    pub probability: f64,
}

/// The full conditional ensemble: one entry per environment index with
/// nonzero probability, plus the indices excluded as zero-probability.
#[derive(Debug, Clone)]
pub struct ConditionalEnsemble {
    pub draws: Vec<ConditionalDraw>,
    pub excluded: Vec<usize>,
}

// Rotate psi by (I (x) B^dagger): column q2 of the result matrix holds the
// unnormalized conditional vector <b_q2|psi>.
fn conditional_matrix(psi: &StateVector, basis: &UnitaryMatrix, split: BipartiteSplit) -> CMatrix {
    let (d1, d2) = (split.d1, split.d2);
    let v = psi.as_vector();
    let m = CMatrix::from_fn(d1, d2, |i, j| v[i * d2 + j]);
    let b = basis.as_matrix().map(|z| z.conj());
    // out[i, q2] = sum_j conj(B[j, q2]) psi[i, j]
    m * b
}

fn ensemble_from_matrix(cm: &CMatrix) -> ConditionalEnsemble {
    let d2 = cm.ncols();
    let mut draws = Vec::with_capacity(d2);
    let mut excluded = Vec::new();
    for q2 in 0..d2 {
        let col = CVector::from_column_slice(cm.column(q2).as_slice());
        let p = col.norm_squared();
        if p <= ZERO_PROBABILITY_TOL {
            excluded.push(q2);
            continue;
        }
        let psi1 = project_to_sphere(&col).expect("nonzero by the probability check");
        draws.push(ConditionalDraw {
            q2,
            psi1,
            probability: p,
        });
    }
    ConditionalEnsemble { draws, excluded }
}

/// Enumerates the conditional wave function for every basis index of the
/// second factor, with its probability. Probabilities sum to 1.
pub fn conditional_ensemble(
    psi: &StateVector,
    basis: &UnitaryMatrix,
    split: BipartiteSplit,
) -> Result<ConditionalEnsemble> {
    split.check(psi)?;
    if basis.dim() != split.d2 {
        return Err(Error::DimensionMismatch {
            expected: split.d2,
            got: basis.dim(),
        });
    }
    Ok(ensemble_from_matrix(&conditional_matrix(psi, basis, split)))
}

/// `conditional_ensemble` against the standard basis of the second factor.
pub fn conditional_ensemble_standard(
    psi: &StateVector,
    split: BipartiteSplit,
) -> Result<ConditionalEnsemble> {
    split.check(psi)?;
    let (d1, d2) = (split.d1, split.d2);
    let v = psi.as_vector();
    let cm = CMatrix::from_fn(d1, d2, |i, j| v[i * d2 + j]);
    Ok(ensemble_from_matrix(&cm))
}

fn sample_index(probabilities: impl Iterator<Item = f64> + Clone, rng: &mut RngStream) -> usize {
    let total: f64 = probabilities.clone().sum();
    let mut pick = rng.gen::<f64>() * total;
    let mut last = 0;
    for (n, p) in probabilities.enumerate() {
        last = n;
        if pick < p {
            return n;
        }
        pick -= p;
    }
    last
}

/// Samples the environment index `q2` with probability `||<q2|psi>||^2` and
/// returns the normalized conditional wave function.
pub fn conditional_draw(
    psi: &StateVector,
    basis: &UnitaryMatrix,
    split: BipartiteSplit,
    rng: &mut RngStream,
) -> Result<ConditionalDraw> {
    let ensemble = conditional_ensemble(psi, basis, split)?;
    let k = sample_index(ensemble.draws.iter().map(|d| d.probability), rng);
    Ok(ensemble.draws[k].clone())
}

/// A conditional draw against a fresh Haar-random basis of the second
/// factor, in `O(d2)` instead of the `O(d2^3)` a dense Haar unitary costs.
///
/// Uses the Schmidt form `psi = sum_i c_i chi_i (x) phi_i`: for a Haar basis
/// `{u_j}` the overlap matrix `<u_j|phi_i>` is jointly distributed as a
/// Haar-random orthonormal `rank`-tuple in `C^{d2}`, so the conditional
/// probabilities are `p_j = sum_i c_i^2 |W_ji|^2` and the conditional vector
/// is `sum_i c_i W_ji chi_i`. The law of the result is identical to
/// `conditional_draw` with `basis = haar_unitary(d2)`.
pub fn conditional_draw_haar(
    psi: &StateVector,
    split: BipartiteSplit,
    rng: &mut RngStream,
) -> Result<ConditionalDraw> {
    split.check(psi)?;
    let sd = schmidt(psi, split.d1, split.d2)?;
    let r = sd.rank();
    let w = haar_orthonormal_system(split.d2, r, rng)?;
    let wm = w.as_matrix();
    let probs: Vec<f64> = (0..split.d2)
        .map(|j| {
            (0..r)
                .map(|i| sd.coefficients[i] * sd.coefficients[i] * wm[(j, i)].norm_sqr())
                .sum()
        })
        .collect();
    let q2 = sample_index(probs.iter().copied(), rng);
    let mut v = CVector::zeros(split.d1);
    for i in 0..r {
        let z = C64::new(sd.coefficients[i], 0.0) * wm[(q2, i)];
        for a in 0..split.d1 {
            v[a] += z * sd.left_basis[(a, i)];
        }
    }
    Ok(ConditionalDraw {
        q2,
        psi1: project_to_sphere(&v)?,
        probability: probs[q2],
    })
}

/// Draws from the uniform measure on composite states with reduced density
/// matrix exactly `rho1`: `psi = sum_i sqrt(p_i) chi_i (x) phi_i` with the
/// `chi_i` an eigenbasis of `rho1` and `{phi_i}` a Haar-random orthonormal
/// system in the second factor. Requires `rank(rho1) <= d2`.
pub fn sample_fixed_reduced(
    rho1: &DensityMatrix,
    d2: usize,
    rng: &mut RngStream,
) -> Result<StateVector> {
    check_dim(rho1.dim() * d2)?;
    let spec = rho1.spectral()?;
    let support: Vec<usize> = (0..rho1.dim())
        .filter(|&n| spec.eigenvalues[n] > RANK_TOL)
        .collect();
    let rank = support.len();
    if rank > d2 {
        return Err(Error::RankExceedsEnvironment { rank, d2 });
    }
    let phi = haar_orthonormal_system(d2, rank, rng)?;
    let d1 = rho1.dim();
    let mut v = CVector::zeros(d1 * d2);
    for (k, &n) in support.iter().enumerate() {
        let c = C64::new(spec.eigenvalues[n].sqrt(), 0.0);
        for i in 0..d1 {
            let left = spec.eigenvectors[(i, n)];
            for j in 0..d2 {
                v[i * d2 + j] += c * left * phi.as_matrix()[(j, k)];
            }
        }
    }
    project_to_sphere(&v)
}

/// The spectral window `[e, e + delta]` of a Hamiltonian: the retained
/// eigenvalues and an orthonormal basis of the corresponding subspace.
/// Endpoints are inclusive.
#[derive(Debug, Clone)]
pub struct MicrocanonicalSpec {
    pub energy: f64,
    pub delta: f64,
    pub levels: Vec<f64>,
    pub basis: OrthonormalSystem,
}

impl MicrocanonicalSpec {
    pub fn subspace_dim(&self) -> usize {
        self.basis.len()
    }

    /// The microcanonical density matrix `P / dim` on the window subspace.
    pub fn density_matrix(&self) -> Result<DensityMatrix> {
        let k = self.subspace_dim() as f64;
        let b = self.basis.as_matrix();
        let m = b * b.adjoint() / C64::new(k, 0.0);
        DensityMatrix::new(m)
    }
}

/// Builds the microcanonical window spec for `[e, e + delta]`.
pub fn microcanonical_spec(
    hamiltonian: &HermitianOperator,
    e: f64,
    delta: f64,
) -> Result<MicrocanonicalSpec> {
    if delta < 0.0 || !delta.is_finite() || !e.is_finite() {
        return Err(Error::InvalidParameter("window must be finite".into()));
    }
    let spec = hamiltonian.spectral();
    let kept: Vec<usize> = (0..hamiltonian.dim())
        .filter(|&n| spec.eigenvalues[n] >= e && spec.eigenvalues[n] <= e + delta)
        .collect();
    if kept.is_empty() {
        return Err(Error::EmptyEnergyWindow {
            e,
            e_plus_delta: e + delta,
        });
    }
    let mut basis = CMatrix::zeros(hamiltonian.dim(), kept.len());
    let mut levels = Vec::with_capacity(kept.len());
    for (col, &n) in kept.iter().enumerate() {
        basis.set_column(col, &spec.eigenvectors.column(n));
        levels.push(spec.eigenvalues[n]);
    }
    Ok(MicrocanonicalSpec {
        energy: e,
        delta,
        levels,
        basis: OrthonormalSystem::new_unchecked(basis),
    })
}

/// Uniform draw on the unit sphere of the window subspace: a standard
/// complex Gaussian in subspace coordinates, projected to the sphere.
pub fn sample_microcanonical(spec: &MicrocanonicalSpec, rng: &mut RngStream) -> StateVector {
    let k = spec.subspace_dim();
    let z = CVector::from_fn(k, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let v = spec.basis.as_matrix() * z;
    project_to_sphere(&v).expect("Gaussian draw is nonzero almost surely")
}

/// Decoupled composite Hamiltonian `H1 (x) I + I (x) H2`. Its spectrum is
/// the sumset `{E_i + E_j}` with product eigenvectors.
pub fn composite_hamiltonian(
    h1: &HermitianOperator,
    h2: &HermitianOperator,
) -> Result<HermitianOperator> {
    let (d1, d2) = (h1.dim(), h2.dim());
    check_dim(d1 * d2)?;
    let i1 = CMatrix::identity(d1, d1);
    let i2 = CMatrix::identity(d2, d2);
    let m = h1.as_matrix().kronecker(&i2) + i1.kronecker(h2.as_matrix());
    HermitianOperator::new(m)
}
