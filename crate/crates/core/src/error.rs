use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("transition matrix is not square ({rows} rows, row {row} has {cols} entries)")]
    NotSquare { rows: usize, row: usize, cols: usize },
    #[error("transition entry ({row}, {col}) is {value}, expected 0 or 1")]
    NonBinary { row: usize, col: usize, value: i64 },
    #[error("shift is not transitive: symbol {to} is unreachable from symbol {from}")]
    NonTransitive { from: usize, to: usize },
    #[error("symbol {symbol} is outside the alphabet 1..={alphabet}")]
    SymbolOutOfRange { symbol: usize, alphabet: usize },
    #[error("word is not admissible: transition {from} -> {to} is forbidden")]
    Inadmissible { from: usize, to: usize },
    #[error("enumeration would produce {count} items, above the cap of {cap}")]
    PeriodTooLarge { count: u128, cap: u128 },
    #[error("words have no common index range around position 0")]
    DisjointRanges,
    #[error("window does not cover position {position}")]
    WindowTooShort { position: isize },
    #[error("no matrix is defined for window {window}")]
    InadmissibleWindow { window: String },
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("center exponents are not non-increasing")]
    CenterNotSorted,
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("singular value gap {ratio:.3e} at index {k} is below the threshold {threshold}")]
    GapTooSmall { k: usize, ratio: f64, threshold: f64 },
    #[error("frame mismatch: {0}")]
    FrameMismatch(String),
    #[error("inequality ineq4 fails: epsilon {epsilon} must be below half the exponent gap {half_gap}")]
    Ineq4Violated { epsilon: f64, half_gap: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
