use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty support: the Newton polyhedron needs at least one point")]
    EmptySupport,

    #[error("dimension {n} exceeds the cap of {cap}")]
    DimensionCap { n: usize, cap: usize },

    #[error("support of {size} points exceeds the cap of {cap}")]
    SupportCap { size: usize, cap: usize },

    #[error("integer overflow in exact lattice arithmetic")]
    Overflow,

    #[error("covector must be nonnegative and nonzero: {0:?}")]
    InvalidCovector(Vec<i64>),

    #[error("expected a nonzero 0/1 vector, got {0:?}")]
    NotZeroOne(Vec<u32>),

    #[error("face with normal {0:?} is not compact")]
    NotCompact(Vec<i64>),

    #[error("cone is not full-dimensional")]
    NotFullDimensional,

    #[error("cone {index} is not unimodular (|det| = {det})")]
    NotUnimodular { index: usize, det: i128 },

    #[error("invalid tolerance {0}: must be positive and finite")]
    InvalidTolerance(f64),

    #[error("invalid remainder: {0}")]
    InvalidRemainder(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ranking cap exceeded: |I(f)| = {size} > {cap}")]
    RankingCap { size: usize, cap: usize },

    #[error("empty vertex set for ranking {0:?}")]
    EmptyRankingSet(Vec<usize>),

    #[error("degenerate sample plan: {0}")]
    DegeneratePlan(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for the errors that signal an exceeded resource cap.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::DimensionCap { .. }
                | Error::SupportCap { .. }
                | Error::Overflow
                | Error::RankingCap { .. }
        )
    }
}
