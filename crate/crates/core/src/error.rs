use thiserror::Error;

/// Errors produced by the game, solver, learner and harness layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} index {index} out of range (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid mixed strategy: {0}")]
    InvalidStrategy(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("{count} joint type profiles exceed the cap of {cap}")]
    ProfileCapExceeded { count: u128, cap: usize },

    #[error("{count} LP variables exceed the cap of {cap}")]
    VariableCapExceeded { count: u128, cap: usize },

    #[error("horizon T = {horizon} is smaller than the {regions} best-response regions")]
    HorizonTooSmall { horizon: usize, regions: usize },

    #[error("learner {learner} cannot consume {got} feedback")]
    WrongFeedback { learner: &'static str, got: &'static str },

    #[error("empirical optimum needs at least one sample")]
    EmptySamples,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("brute-force grid unsupported: {0}")]
    GridTooLarge(String),

    #[error("{0}")]
    InvalidArgument(String),

    #[error("cannot parse generator spec: {0}")]
    Parse(String),
}

impl Error {
    /// Cap and horizon violations, as opposed to malformed input.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            Error::ProfileCapExceeded { .. }
                | Error::VariableCapExceeded { .. }
                | Error::HorizonTooSmall { .. }
                | Error::GridTooLarge(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
