use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter fell outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid observation: {0}")]
    InvalidObservation(String),

    #[error("cannot parse {0:?} as a number")]
    Parse(String),

    #[error("sample contains no valid observation")]
    EmptySample,

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("unknown statistic {0:?}")]
    UnknownStatistic(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    /// The moment-matching tail approximation produced unusable parameters.
    #[error("approximation failure: {0}")]
    ApproximationFailure(String),

    #[error("cache I/O error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
