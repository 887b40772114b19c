use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("operation requires an all-shift-power system")]
    NotShiftSystem,
    #[error("projected universe has {count} points, cap is {cap}")]
    UniverseTooLarge { count: u128, cap: usize },
    #[error("instance has {count} candidates, budget is {cap}")]
    CandidateBudgetExceeded { count: usize, cap: usize },
    #[error("candidate sets do not cover the universe")]
    Infeasible,
    #[error("theta = 0 requires an explicit length cap")]
    ThetaZeroNeedsCap,
    #[error("exact search requested on {size} points, cap is {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("block-code table would need {entries} entries, cap is {cap}")]
    TableTooLarge { entries: u128, cap: usize },
    #[error("block-code composition depth {depth} exceeds cap {cap}")]
    CompositionTooDeep { depth: usize, cap: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Resource-limit errors, as opposed to malformed input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(
            self,
            Error::UniverseTooLarge { .. }
                | Error::CandidateBudgetExceeded { .. }
                | Error::CapExceeded { .. }
                | Error::TableTooLarge { .. }
                | Error::CompositionTooDeep { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
