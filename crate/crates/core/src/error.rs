use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index {index} out of range for {what} (limit {limit})")]
    Range {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("fixed and free {what} overlap")]
    Overlap { what: &'static str },

    #[error("balance violated: 2|X| + |Y| = {lhs} but 2|X'| + |Y'| = {rhs}")]
    Balance { lhs: usize, rhs: usize },

    #[error("free index sets must be nonempty")]
    EmptyY,

    #[error("pair is not proper: |C| - |C'| = {got}, required {required}")]
    NotProper { got: i64, required: i64 },

    #[error("not a subset: {what}")]
    NotSubset { what: &'static str },

    #[error("source and sink selections differ in size ({rows} vs {cols})")]
    SizeMismatch { rows: usize, cols: usize },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("negative weight at vertex {0}")]
    NegativeWeight(String),

    #[error("matrix dimensions {rows}x{cols} do not match context {expected_rows}x{expected_cols}")]
    Dimension {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },

    #[error("host network lacks the split-edge structure: {0}")]
    Structure(String),

    #[error("witness construction failed: {0}")]
    ConstructionFailure(String),

    #[error("matching is feasible for no proper pair of the context")]
    InfeasibleMatching,

    #[error("instance is universal; no counterexample exists")]
    IsUniversal,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
