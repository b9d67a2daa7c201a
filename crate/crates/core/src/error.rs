use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{n_qubits} qubits exceeds the dense-matrix cap of {cap}")]
    SizeCap { n_qubits: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid Pauli label {label:?}: {reason}")]
    InvalidPauli { label: String, reason: String },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("gate acts on qubit {0} more than once")]
    QubitCollision(usize),

    #[error("malformed partition: {0}")]
    Partition(String),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("expectation value has imaginary residual {0:.3e}")]
    ImaginaryResidual(f64),

    #[error("shot count must be positive")]
    ZeroShots,

    #[error("parameter count mismatch: ansatz takes {expected}, got {actual}")]
    ParameterCount { expected: usize, actual: usize },

    #[error("unsupported ansatz configuration: {0}")]
    Ansatz(String),

    #[error("Hamiltonian has no single-qubit Z terms; use a fixed imaginary time step")]
    NoSingleZTerms,

    #[error("invalid time step {0}")]
    InvalidTimeStep(f64),

    #[error("rank-deficient effective basis: only {0} independent vectors")]
    RankDeficient(usize),

    #[error("upper bound {e_max} is below the ground energy {ground}")]
    BoundBelowGround { e_max: f64, ground: f64 },

    #[error("line {line}: {message}")]
    Table { line: usize, message: String },

    #[error("bond distance {0} not found in table")]
    DistanceNotFound(f64),

    #[error("bond distance {r} outside table range [{min}, {max}]")]
    DistanceOutOfRange { r: f64, min: f64, max: f64 },

    #[error("invalid manifest: {0}")]
    Manifest(String),

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
