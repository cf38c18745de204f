use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported range: M = {m}, N = {n} (both must be at least {min})")]
    UnsupportedRange { m: i64, n: i64, min: i64 },
    #[error("{what} = {value} out of range {lo}..={hi}")]
    OutOfRange {
        what: &'static str,
        value: i64,
        lo: i64,
        hi: i64,
    },
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("parameter point outside the admissible set: {0}")]
    InvalidParameters(String),
    #[error("inexact division: {0}")]
    InexactDivision(String),
    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
