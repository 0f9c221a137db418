use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension overflow: {0}")]
    DimensionOverflow(String),

    #[error("matrix is not Hermitian (max |M - M^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    TraceNotUnit { trace: f64 },

    #[error("{what} is not normalized (norm = {norm})")]
    NotNormalized { what: String, norm: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("unknown subsystem `{0}`")]
    UnknownSubsystem(String),

    #[error("invalid subsystem labels: {0}")]
    InvalidDims(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
