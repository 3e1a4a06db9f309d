use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("generator index {index} outside rank {rank}")]
    LetterOutOfRange { index: usize, rank: usize },

    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },

    #[error("automorphism is not invertible: abelianized determinant is not +-1")]
    NotUnimodular,

    #[error("invalid cut system `{label}`: {reason}")]
    InvalidCutSystem { label: String, reason: String },

    #[error("system `{0}` has no standardizer and no cached reading is available")]
    MissingStandardizer(String),

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("index {index} out of range 1..={max}")]
    InvalidIndex { index: usize, max: usize },

    #[error("lens parameters must be coprime with p >= 1, got ({p}, {q})")]
    NotCoprime { p: u64, q: u64 },

    #[error("size {size} exceeds configured bound {bound}")]
    BoundExceeded { size: u128, bound: u128 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("move {mv} needs a tuple of length at least 2")]
    TupleTooShort { mv: &'static str },

    #[error("boundary mismatch: {left} vs {right}")]
    BoundaryMismatch { left: String, right: String },

    #[error("merge refused: {0}")]
    MergeRefused(String),

    #[error("glue refused: {0}")]
    GlueRefused(String),

    #[error("sector {0} is not expressible in the fundamental group generators")]
    NotExpressible(usize),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}
