use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),
    #[error("invalid degree: vertex {vertex} has degree {degree}, expected 2")]
    InvalidDegree { vertex: usize, degree: usize },
    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("invalid flow: {0}")]
    InvalidFlow(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("qubit {0} is not live")]
    DeadQubit(usize),
    #[error("matrix is not unitary (deviation {0:e})")]
    NonUnitary(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("{what}: {requested} exceeds the cap of {limit}")]
    CapExceeded {
        what: &'static str,
        limit: usize,
        requested: usize,
    },
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("pattern and protocol variant are inconsistent: {0}")]
    InconsistentVariant(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("malformed attack: {0}")]
    MalformedAttack(String),
    #[error("transport: {0}")]
    Transport(String),
    #[error("provider capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("pattern output is not deterministic: {0}")]
    NonDeterministic(String),
    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
