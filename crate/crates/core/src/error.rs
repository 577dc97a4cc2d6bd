use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("non-unique projection")]
    NonUniqueProjection,

    #[error("point is off the manifold (distance {0:e})")]
    OffManifold(f64),

    #[error("noise exceeds reach")]
    NoiseExceedsReach,

    #[error("perturbation exceeds reach budget")]
    PerturbationExceedsReach,

    #[error("grid too large: {cells} cells exceeds budget of {budget}")]
    GridTooLarge { cells: u128, budget: usize },

    #[error("enumeration budget exceeded: {outcomes} outcomes (limit {limit})")]
    EnumerationBudget { outcomes: u128, limit: u128 },

    #[error("need ≥ 3 points, got {0}")]
    NotEnoughPoints(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// True for errors caused by a computation exceeding a configured budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::GridTooLarge { .. } | Error::EnumerationBudget { .. }
        )
    }

    /// True for errors caused by bad user input (configs, files, parameters).
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Parse { .. }
                | Error::InvalidParameter(_)
                | Error::DimensionMismatch { .. }
                | Error::NotEnoughPoints(_)
                | Error::EmptyPointSet
                | Error::NoiseExceedsReach
                | Error::PerturbationExceedsReach
        )
    }
}
