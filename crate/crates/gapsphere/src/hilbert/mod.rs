//! Complex linear-algebra substrate: state vectors, Hermitian and unitary
//! operators, spectral and Schmidt decompositions, Haar-random objects, and
//! the deterministic random-stream contract.
//!
//! All types are immutable after construction and validate their defining
//! invariants in the constructor, so downstream code can rely on them without
//! re-checking. Dense algebra only; total dimensions are capped at
//! [`MAX_TOTAL_DIM`].

mod haar;
mod rng;
mod schmidt;
mod spectral;

pub use haar::{haar_orthonormal_system, haar_unitary};
pub use rng::RngStream;
pub use schmidt::{schmidt, SchmidtDecomposition};
pub use spectral::SpectralDecomposition;

use crate::error::{Error, Result};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CVector = nalgebra::DVector<C64>;
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Hermiticity check tolerance (relative to the largest entry).
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Unit-norm tolerance for state vectors and density-matrix traces.
pub const UNIT_TOL: f64 = 1e-12;
/// Orthonormality and reconstruction tolerance for decompositions.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;
/// Density-matrix eigenvalues in [-CLAMP, 0) are clamped to zero; anything
/// more negative is an error, never silently repaired.
pub const EIGENVALUE_CLAMP_TOL: f64 = 1e-10;
/// Eigenvalues at or below this are treated as outside the support.
pub const RANK_TOL: f64 = 1e-12;
/// Dense-algebra cap on total dimension (d1 * d2 for bipartite systems).
pub const MAX_TOTAL_DIM: usize = 4096;

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::EmptyDimension);
    }
    if d > MAX_TOTAL_DIM {
        return Err(Error::DimensionTooLarge {
            dim: d,
            max: MAX_TOTAL_DIM,
        });
    }
    Ok(())
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// A vector in C^d with finite entries; no normalization requirement.
///
/// Draws from the Gaussian measures live here before projection to the
/// sphere. Plain `CVector`s are accepted anywhere a raw vector is expected;
/// this alias names the role.
pub type RawVector = CVector;

/// A unit vector in C^d.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    /// Wraps a vector already on the unit sphere (within [`UNIT_TOL`]).
    pub fn new(v: CVector) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::EmptyDimension);
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFiniteEntries);
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotNormalized {
                norm,
                tolerance: UNIT_TOL,
            });
        }
        Ok(StateVector(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    /// `<self|other>` with the conjugation on `self`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.0.dotc(&other.0)
    }

    /// Standard basis vector `|k>`.
    pub fn basis_state(d: usize, k: usize) -> Result<Self> {
        check_dim(d)?;
        if k >= d {
            return Err(Error::IndexOutOfRange { index: k, len: d });
        }
        let mut v = CVector::zeros(d);
        v[k] = C64::new(1.0, 0.0);
        Ok(StateVector(v))
    }

    /// Tensor product `self (x) other`, indexed row-major: entry
    /// `(i * d2 + j)` is `self[i] * other[j]`.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let d = self.dim() * other.dim();
        check_dim(d)?;
        let mut v = CVector::zeros(d);
        for i in 0..self.dim() {
            for j in 0..other.dim() {
                v[i * other.dim() + j] = self.0[i] * other.0[j];
            }
        }
        // product of unit vectors is unit up to rounding
        let n = v.norm();
        Ok(StateVector(v / C64::new(n, 0.0)))
    }
}

/// Projection to the unit sphere: `phi / ||phi||`. Defined away from zero.
pub fn project_to_sphere(phi: &RawVector) -> Result<StateVector> {
    if phi.is_empty() {
        return Err(Error::EmptyDimension);
    }
    let norm = phi.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(StateVector(phi / C64::new(norm, 0.0)))
}

/// A positive semidefinite, unit-trace Hermitian operator.
///
/// The constructor verifies Hermiticity and trace to [`UNIT_TOL`] and runs an
/// eigendecomposition to reject matrices with eigenvalues below
/// `-EIGENVALUE_CLAMP_TOL`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(matrix, HERMITICITY_TOL, UNIT_TOL)
    }

    /// Constructor with caller-supplied tolerances for the Hermiticity and
    /// trace checks. The eigenvalue floor stays at [`EIGENVALUE_CLAMP_TOL`].
    pub fn with_tolerance(matrix: CMatrix, herm_tol: f64, trace_tol: f64) -> Result<Self> {
        let d = matrix.nrows();
        check_dim(d)?;
        if matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.ncols(),
            });
        }
        let scale = max_abs(&matrix).max(1.0);
        let dev = hermitian_deviation(&matrix);
        if dev > herm_tol * scale {
            return Err(Error::NotHermitian {
                max_deviation: dev,
                tolerance: herm_tol * scale,
            });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > trace_tol.max(1e-12 * d as f64) {
            return Err(Error::TraceNotOne {
                trace,
                tolerance: trace_tol,
            });
        }
        let dm = DensityMatrix { matrix };
        // positivity: reuse the clamped spectral path, which errors on
        // eigenvalues below the clamp threshold
        dm.spectral()?;
        Ok(dm)
    }

    /// Builds `sum_n p_n |v_n><v_n|` from eigenpairs; weights are normalized.
    pub fn from_eigensystem(weights: &[f64], vectors: &CMatrix) -> Result<Self> {
        let d = vectors.nrows();
        check_dim(d)?;
        if weights.len() != vectors.ncols() {
            return Err(Error::DimensionMismatch {
                expected: weights.len(),
                got: vectors.ncols(),
            });
        }
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidWeights);
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidWeights);
        }
        let mut m = CMatrix::zeros(d, d);
        for (k, &w) in weights.iter().enumerate() {
            let col = vectors.column(k);
            let p = C64::new(w / total, 0.0);
            for i in 0..d {
                for j in 0..d {
                    m[(i, j)] += p * col[i] * col[j].conj();
                }
            }
        }
        DensityMatrix::new(m)
    }

    /// Diagonal density matrix from probability weights (normalized).
    pub fn from_diagonal(weights: &[f64]) -> Result<Self> {
        let d = weights.len();
        check_dim(d)?;
        if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidWeights);
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidWeights);
        }
        let mut m = CMatrix::zeros(d, d);
        for (i, &w) in weights.iter().enumerate() {
            m[(i, i)] = C64::new(w / total, 0.0);
        }
        Ok(DensityMatrix { matrix: m })
    }

    /// The pure state `|psi><psi|`.
    pub fn pure(psi: &StateVector) -> Self {
        let d = psi.dim();
        let v = psi.as_vector();
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        DensityMatrix { matrix: m }
    }

    /// Maximally mixed state I/d.
    pub fn maximally_mixed(d: usize) -> Result<Self> {
        check_dim(d)?;
        let mut m = CMatrix::zeros(d, d);
        for i in 0..d {
            m[(i, i)] = C64::new(1.0 / d as f64, 0.0);
        }
        Ok(DensityMatrix { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `<phi|rho|phi>` as a real number.
    pub fn expectation(&self, phi: &StateVector) -> f64 {
        (&self.matrix * phi.as_vector()).dotc(phi.as_vector()).re.max(0.0)
    }

    /// Eigendecomposition with ascending eigenvalues. Eigenvalues within
    /// [`EIGENVALUE_CLAMP_TOL`] of the interval [0, 1] are clamped onto it;
    /// larger violations are contract errors.
    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        let raw = spectral::decompose(&self.matrix);
        let min = raw.eigenvalues.first().copied().unwrap_or(0.0);
        let max = raw.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -EIGENVALUE_CLAMP_TOL {
            return Err(Error::NotPositive {
                min_eigenvalue: min,
                tolerance: EIGENVALUE_CLAMP_TOL,
            });
        }
        if max > 1.0 + EIGENVALUE_CLAMP_TOL {
            return Err(Error::InvalidParameter(format!(
                "density-matrix eigenvalue {max} exceeds 1"
            )));
        }
        let mut clamped = raw;
        for p in &mut clamped.eigenvalues {
            *p = p.clamp(0.0, 1.0);
        }
        Ok(clamped)
    }

    /// Conjugation `U rho U*`.
    pub fn conjugate(&self, u: &UnitaryMatrix) -> Result<DensityMatrix> {
        if u.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: u.dim(),
            });
        }
        let m = u.as_matrix() * &self.matrix * u.as_matrix().adjoint();
        Ok(DensityMatrix { matrix: m })
    }

    /// Tensor product of density matrices, row-major index convention.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let d = self.dim() * other.dim();
        check_dim(d)?;
        Ok(DensityMatrix {
            matrix: self.matrix.kronecker(&other.matrix),
        })
    }
}

/// A Hermitian operator, typically a Hamiltonian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        check_dim(d)?;
        if matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.ncols(),
            });
        }
        let scale = max_abs(&matrix).max(1.0);
        let dev = hermitian_deviation(&matrix);
        if dev > HERMITICITY_TOL * scale {
            return Err(Error::NotHermitian {
                max_deviation: dev,
                tolerance: HERMITICITY_TOL * scale,
            });
        }
        Ok(HermitianOperator { matrix })
    }

    /// Diagonal operator from real entries (e.g. energy levels).
    pub fn from_diagonal(levels: &[f64]) -> Result<Self> {
        check_dim(levels.len())?;
        let mut m = CMatrix::zeros(levels.len(), levels.len());
        for (i, &e) in levels.iter().enumerate() {
            m[(i, i)] = C64::new(e, 0.0);
        }
        Ok(HermitianOperator { matrix: m })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `<psi|H|psi>` as a real number.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        (&self.matrix * psi.as_vector()).dotc(psi.as_vector()).re
    }

    /// Eigendecomposition with ascending eigenvalues.
    pub fn spectral(&self) -> SpectralDecomposition {
        spectral::decompose(&self.matrix)
    }
}

/// A d x d unitary matrix, `U*U = I` within [`ORTHONORMALITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: CMatrix,
}

impl UnitaryMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        check_dim(d)?;
        if matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: matrix.ncols(),
            });
        }
        let gram = matrix.adjoint() * &matrix;
        let dev = max_abs(&(gram - CMatrix::identity(d, d)));
        if dev > ORTHONORMALITY_TOL {
            return Err(Error::NotUnitary { max_deviation: dev });
        }
        Ok(UnitaryMatrix { matrix })
    }

    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        UnitaryMatrix { matrix }
    }

    pub fn identity(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(UnitaryMatrix {
            matrix: CMatrix::identity(d, d),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Column `k` as a state vector.
    pub fn column(&self, k: usize) -> Result<StateVector> {
        if k >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.dim(),
            });
        }
        project_to_sphere(&CVector::from_column_slice(self.matrix.column(k).as_slice()))
    }

    /// Applies the unitary to a state.
    pub fn apply(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: psi.dim(),
            });
        }
        project_to_sphere(&(&self.matrix * psi.as_vector()))
    }
}

/// `k <= m` orthonormal columns in C^m.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalSystem {
    columns: CMatrix,
}

impl OrthonormalSystem {
    pub fn new(columns: CMatrix) -> Result<Self> {
        let m = columns.nrows();
        let k = columns.ncols();
        check_dim(m)?;
        if k == 0 {
            return Err(Error::EmptyDimension);
        }
        if k > m {
            return Err(Error::SystemTooLarge { k, m });
        }
        let gram = columns.adjoint() * &columns;
        let dev = max_abs(&(gram - CMatrix::identity(k, k)));
        if dev > ORTHONORMALITY_TOL {
            return Err(Error::NotOrthonormal { max_deviation: dev });
        }
        Ok(OrthonormalSystem { columns })
    }

    pub(crate) fn new_unchecked(columns: CMatrix) -> Self {
        OrthonormalSystem { columns }
    }

    /// Ambient dimension m.
    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    /// Number of vectors k.
    pub fn len(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.ncols() == 0
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.columns
    }

    pub fn vector(&self, k: usize) -> Result<StateVector> {
        if k >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.len(),
            });
        }
        project_to_sphere(&CVector::from_column_slice(self.columns.column(k).as_slice()))
    }
}

/// The partial inner product `<q2|psi>` taken in the second factor of
/// `C^{d1} (x) C^{d2}`, for the basis vector `|q2>` given by column `q2` of
/// `basis`. The result is a generally unnormalized vector in `C^{d1}`.
pub fn partial_inner(
    q2: usize,
    psi: &StateVector,
    basis: &UnitaryMatrix,
    d1: usize,
    d2: usize,
) -> Result<RawVector> {
    if basis.dim() != d2 {
        return Err(Error::DimensionMismatch {
            expected: d2,
            got: basis.dim(),
        });
    }
    if psi.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            got: psi.dim(),
        });
    }
    if q2 >= d2 {
        return Err(Error::IndexOutOfRange { index: q2, len: d2 });
    }
    let v = psi.as_vector();
    let b = basis.as_matrix();
    let mut out = CVector::zeros(d1);
    for i in 0..d1 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..d2 {
            acc += b[(j, q2)].conj() * v[i * d2 + j];
        }
        out[i] = acc;
    }
    Ok(out)
}

/// `partial_inner` against the standard basis of the second factor.
pub fn partial_inner_standard(
    q2: usize,
    psi: &StateVector,
    d1: usize,
    d2: usize,
) -> Result<RawVector> {
    if psi.dim() != d1 * d2 {
        return Err(Error::DimensionMismatch {
            expected: d1 * d2,
            got: psi.dim(),
        });
    }
    if q2 >= d2 {
        return Err(Error::IndexOutOfRange { index: q2, len: d2 });
    }
    let v = psi.as_vector();
    let mut out = CVector::zeros(d1);
    for i in 0..d1 {
        out[i] = v[i * d2 + q2];
    }
    Ok(out)
}
