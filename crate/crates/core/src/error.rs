use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("multi-index code {code} out of range for {n} qubits")]
    IndexOutOfRange { code: usize, n: usize },
    #[error("qubit position {k} out of range 1..={n}")]
    QubitOutOfRange { k: usize, n: usize },
    #[error("invalid qubit count {0}")]
    QubitCount(usize),
    #[error("amplitude vector length {0} is not 2^n for n >= 1")]
    BadLength(usize),
    #[error("numeric modes do not match (float vs exact)")]
    ModeMismatch,
    #[error("state vector is zero")]
    ZeroVector,
    #[error("invalid pairing: {0}")]
    InvalidPairing(String),
    #[error("empty column selection")]
    EmptySelection,
    #[error("triple {0} must not appear in the comparison selection")]
    OverlappingSelection(usize),
    #[error("contraction with the pair state on qubits ({0}, {1}) leaves a zero residual")]
    ZeroResidual(usize, usize),
    #[error("state is not of minimum orbit dimension (orbit dimension {orbit_dimension}, minimum {minimum})")]
    NotMinimal { orbit_dimension: usize, minimum: usize },
    #[error("pair ({0}, {1}) is not in canonical product form; use pairing classification instead")]
    NonCanonicalFactor(usize, usize),
    #[error("inconsistent singlet structure: {0}")]
    InconsistentStructure(String),
    #[error("matrix is not special unitary (deviation {0:e})")]
    NotSpecialUnitary(f64),
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("unknown verification suite `{0}`")]
    UnknownSuite(String),
    #[error("exact backend requires an exact-mode state")]
    ExactUnavailable,
    #[error("parse error: {0}")]
    Parse(String),
}
