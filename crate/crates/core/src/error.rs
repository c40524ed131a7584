use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("edge {edge} is a self-loop on vertex {vertex}")]
    SelfLoop { edge: usize, vertex: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} of size {actual} exceeds the limit {limit}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    #[error("stabilizer rows {first} and {second} anticommute")]
    NonCommuting { first: usize, second: usize },

    #[error("syndrome is not in the column space of the check matrix")]
    UnreachableSyndrome,

    #[error("subset is not an even cover: {0}")]
    NotEvenCover(String),

    #[error("chain is not reversible: detailed-balance deviation {deviation:e}")]
    NonReversible { deviation: f64 },

    #[error("did not reach the mixing threshold within {steps} steps")]
    NotConverged { steps: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
