use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("column index {index} out of range ({ncols} columns)")]
    ColumnOutOfRange { index: usize, ncols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dataset must have at least one row and one column")]
    EmptyDataset,

    #[error("completions disagree on an observed cell (completion {completion}, row {row}, column {col})")]
    ObservedCellMismatch {
        completion: usize,
        row: usize,
        col: usize,
    },

    #[error("analyzer failed on completion {completion}: {source}")]
    Analyzer {
        completion: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("matrix is not positive definite (pivot {pivot} is not positive)")]
    NotPositiveDefinite { pivot: usize },

    #[error("design matrix is rank deficient beyond ridge repair (pivot {pivot})")]
    RankDeficient { pivot: usize },

    #[error("degrees of freedom must be positive, got {df}")]
    InvalidDegreesOfFreedom { df: f64 },

    #[error("probability must lie strictly inside (0, 1), got {p}")]
    InvalidProbability { p: f64 },

    #[error("pooling requires at least two imputations, got m = {m}")]
    TooFewImputations { m: usize },

    #[error("within-imputation variance {value} at position {index} is negative")]
    NegativeWithinVariance { index: usize, value: f64 },

    #[error("complete-data degrees of freedom must be positive, got {nu_com}")]
    InvalidCompleteDf { nu_com: f64 },

    #[error("{name} = {value} is outside the valid range {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("column {column} has no observed values")]
    NoObservedValues { column: String },

    #[error("column {column} has {observed} observed rows but the regression needs at least {needed}")]
    TooFewObservedRows {
        column: String,
        observed: usize,
        needed: usize,
    },

    #[error("missingness rate must lie strictly inside (0, 1), got {rate}")]
    InvalidMissingRate { rate: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("replication {rep} at rate {rate} failed after {retries} retries: {source}")]
    RetriesExhausted {
        rate: f64,
        rep: usize,
        retries: u32,
        #[source]
        source: Box<Error>,
    },

    #[error("CSV parse error at line {line}: {reason}")]
    CsvParse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
