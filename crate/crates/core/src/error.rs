use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("zero has no inverse modulo {0}")]
    ZeroInverse(u64),

    #[error("invalid field parameters: {0}")]
    InvalidField(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("invalid terminal cut: {0}")]
    InvalidCut(String),

    #[error("expanding capacities would create {requested} edges (limit {limit})")]
    CapacityOverflow { requested: u64, limit: u64 },

    #[error("no edge is incident on a terminal; the sketch would have no query surface")]
    EmptyTerminals,

    #[error("{what} exceeds the supported size ({got} > {limit})")]
    SizeLimit { what: &'static str, got: usize, limit: usize },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: negative weight {weight}")]
    NegativeWeight { line: usize, weight: i64 },

    #[error("malformed sketch container: {0}")]
    Format(String),

    #[error("unsupported container version {found} (expected {expected})")]
    Version { found: u64, expected: u64 },

    #[error("sketch holds a {found} payload but {expected} was requested")]
    TagMismatch { expected: String, found: String },
}
