use thiserror::Error;

/// Structural and precondition failures.
///
/// Law violations (a non-associative table, a lost game) are not errors; they
/// are reported through [`crate::algebra::ValidationReport`] and friends.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("atom index {index} out of range for a structure with {len} atoms")]
    AtomOutOfRange { index: usize, len: usize },
    #[error("duplicate atom name `{0}`")]
    DuplicateAtom(String),
    #[error("malformed structure: {0}")]
    Malformed(String),
    #[error("element belongs to a different atom structure")]
    OwnershipMismatch,
    #[error("index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("{what} exceeds cap ({size} > {cap})")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },
    #[error("too large for exact mode: {vertices} vertices (cap {cap})")]
    TooLargeForExact { vertices: usize, cap: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("provenance mismatch: {0}")]
    Provenance(String),
    #[error("structure failed validation: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown format `{0}`")]
    UnknownFormat(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
