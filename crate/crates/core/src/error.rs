use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid antenna configuration: {0}")]
    InvalidConfig(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("topology mismatch: {0}")]
    TopologyMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("random vector quantization limited to 16 bits, got {0}")]
    CodebookTooLarge(u32),

    #[error("{what}: {count} exceeds the enumeration limit of {limit}")]
    EnumerationLimit {
        what: &'static str,
        count: usize,
        limit: usize,
    },

    #[error("configuration is not IA-feasible (improper)")]
    Infeasible,

    #[error("TX {tx} has no CSIT for channel block H[{rx}][{from}]")]
    InsufficientCsit { tx: usize, rx: usize, from: usize },

    #[error("channel matrix is singular or ill-conditioned (condition number {0:.3e})")]
    IllConditioned(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed allocation table, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty result table")]
    EmptyTable,
}
