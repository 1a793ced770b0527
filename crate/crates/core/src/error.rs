use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{requested} qubits exceeds the configured cap of {cap}")]
    QubitCapExceeded { requested: usize, cap: usize },

    #[error("state must have at least one qubit")]
    NoQubits,

    #[error("amplitude vector has length {got}, expected 2^{n_qubits} = {expected}")]
    AmplitudeLength {
        n_qubits: usize,
        expected: usize,
        got: usize,
    },

    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),

    #[error("state norm squared is {norm_sqr}, not 1 within {tol}")]
    NotNormalized { norm_sqr: f64, tol: f64 },

    #[error("density matrix is not Hermitian (max deviation {0})")]
    NotHermitian(f64),

    #[error("density matrix trace is {0}, not 1")]
    BadTrace(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid qubit set: {0}")]
    InvalidQubitSet(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("local unitary: {0}")]
    InvalidLocalUnitary(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("{value} is outside the supported range {min}..={max}")]
    OutOfRange {
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("shape/assignment mismatch: {0}")]
    ShapeMismatch(String),

    #[error("factorization inconsistent: {0}")]
    FactorizationInconsistent(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("unknown measurement basis {0:?} (expected Z or X)")]
    InvalidBasis(String),

    #[error("unknown property id {0} (expected 1..=4)")]
    InvalidProperty(u8),

    #[error("state norm defect {defect:e} exceeds the load limit {limit:e}")]
    NormDefect { defect: f64, limit: f64 },

    #[error("format error: {0}")]
    Format(String),
}
