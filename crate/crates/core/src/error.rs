use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit {qubit} out of range for a {num_qubits}-qubit circuit")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("overlapping registers: {0}")]
    RegisterOverlap(String),

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("PARTITION components overlap ({0}); use SUM for overlapping components")]
    PartitionOverlap(String),

    #[error("validation failed: phase-aligned distance {distance:.3e} is not below tol {tol:.3e}")]
    ValidationFailed { distance: f64, tol: f64 },

    #[error("{num_qubits} qubits exceeds the simulation cap of {cap}")]
    QubitCap { num_qubits: usize, cap: usize },

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("zero vector: {0}")]
    ZeroVector(String),

    #[error("mps: {0}")]
    Mps(String),
}

pub type Result<T> = std::result::Result<T, Error>;
