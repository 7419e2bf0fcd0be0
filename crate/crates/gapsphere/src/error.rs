use thiserror::Error;

/// Errors raised by contract violations across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |A - A*| = {max_deviation:.3e} exceeds tolerance {tolerance:.3e}")]
    NotHermitian { max_deviation: f64, tolerance: f64 },

    #[error("matrix is not a density matrix: smallest eigenvalue {min_eigenvalue:.3e} below -{tolerance:.3e}")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("trace is {trace:.12} but must be 1 within {tolerance:.3e}")]
    TraceNotOne { trace: f64, tolerance: f64 },

    #[error("matrix is not unitary: max |U*U - I| = {max_deviation:.3e}")]
    NotUnitary { max_deviation: f64 },

    #[error("columns are not orthonormal: max |V*V - I| = {max_deviation:.3e}")]
    NotOrthonormal { max_deviation: f64 },

    #[error("vector norm {norm:.12} is not 1 within {tolerance:.3e}")]
    NotNormalized { norm: f64, tolerance: f64 },

    #[error("vector entries must be finite")]
    NonFiniteEntries,

    #[error("cannot project the zero vector to the sphere")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("index {index} out of range for dimension {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("total dimension {dim} exceeds the dense-algebra cap {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("dimension must be at least 1")]
    EmptyDimension,

    #[error("empty input")]
    EmptyInput,

    #[error("orthonormal system size {k} exceeds ambient dimension {m}")]
    SystemTooLarge { k: usize, m: usize },

    #[error("rank {rank} of the reduced density matrix exceeds environment dimension {d2}")]
    RankExceedsEnvironment { rank: usize, d2: usize },

    #[error("no eigenvalues in the energy window [{e:.6}, {e_plus_delta:.6}]")]
    EmptyEnergyWindow { e: f64, e_plus_delta: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Fock cutoff {cutoff} too small: {reason}")]
    InsufficientCutoff { cutoff: usize, reason: String },

    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("weights must be nonnegative with positive sum")]
    InvalidWeights,
}

pub type Result<T> = std::result::Result<T, Error>;
