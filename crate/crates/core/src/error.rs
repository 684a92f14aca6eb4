use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("map {index} is not a contraction (operator norm {ratio})")]
    NotContraction { index: usize, ratio: f64 },

    #[error("map {index} is degenerate (operator norm 0)")]
    DegenerateMap { index: usize },

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("non-finite coordinate")]
    NonFinite,

    #[error("cell index overflow at scale {scale}")]
    CellOverflow { scale: f64 },

    #[error("{requested} points exceed the budget of {budget}; use the chaos game instead")]
    BudgetExceeded { requested: u128, budget: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("profile does not cross 1 on the given delta range")]
    NoCrossing,

    #[error("unsupported dimension {0}: only 1-D and 2-D regions are supported")]
    UnsupportedDimension(usize),

    #[error("degenerate region: {0}")]
    DegenerateRegion(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Numeric conditions (as opposed to bad input) such as a degenerate fit or
    /// a profile without a crossing.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateRegression(_) | Error::NoCrossing | Error::Internal(_) | Error::CellOverflow { .. }
        )
    }
}
