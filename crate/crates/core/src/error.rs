use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape {rows}x{cols} (data length {len})")]
    InvalidShape { rows: usize, cols: usize, len: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is numerically rank deficient (column {column})")]
    RankDeficient { column: usize },
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },
    #[error("invalid rank {rank} (must be in 1..={max})")]
    InvalidRank { rank: usize, max: usize },
    #[error("basis is not orthonormal (deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("invalid epsilon {0}")]
    InvalidEps(f64),
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("invalid band width {b} for size {n}")]
    InvalidBand { n: usize, b: usize },
    #[error("{0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
