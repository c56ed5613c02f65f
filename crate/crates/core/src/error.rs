//! Error and diagnostic types shared across the crate.

use thiserror::Error;

/// Errors produced by the algebraic operations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("generator index {gen} out of range for alphabet of size {alphabet_size}")]
    LetterOutOfRange { gen: u32, alphabet_size: usize },

    #[error("alphabet mismatch: expected size {expected}, got {found}")]
    AlphabetMismatch { expected: usize, found: usize },

    #[error("coset index {coset} out of range for {count} cosets")]
    CosetOutOfRange { coset: usize, count: usize },

    #[error("word is not a member of the subgroup")]
    NotInSubgroup,

    #[error("subgroup is not contained in the claimed overgroup")]
    NotContained,

    #[error("primitive root of the empty word is undefined")]
    EmptyWordRoot,

    #[error("endomorphism does not preserve the subgroup: {0}")]
    InvarianceViolation(String),

    #[error("endomorphism fails a presentation relation: {0}")]
    InvalidEndo(String),

    #[error("operation requires a free presentation (single coset), got {cosets} cosets")]
    FreeOnly { cosets: usize },

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// Positioned syntax error for the presentation/endomorphism file format.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(line: usize, col: usize, msg: impl Into<String>) -> Self {
        ParseError {
            line,
            col,
            msg: msg.into(),
        }
    }
}
