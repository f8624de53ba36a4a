use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid vertex count {0}: a 3-regular graph needs an even n >= 4")]
    InvalidVertexCount(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("n = {n} exceeds the enumeration limit of {limit}")]
    TooLargeToEnumerate { n: usize, limit: usize },

    #[error("cannot flip {d} bits of a {n}-bit assignment")]
    FlipOutOfRange { d: usize, n: usize },

    #[error("qubit count {n} outside the supported range 1..={limit}")]
    QubitLimit { n: usize, limit: usize },

    #[error("depth mismatch: ansatz has p = {expected}, parameters have p = {found}")]
    DepthMismatch { expected: usize, found: usize },

    #[error("bias strength {0} > 0 requires an approximate solution")]
    MissingWarmStart(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no QAOA baseline (alpha = 0) records at p = {0}")]
    MissingBaseline(usize),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("requested {requested} warm starts but only {available} non-solution strings exist")]
    TooManyWarmStarts { requested: usize, available: usize },
}
