use crate::analytics::SweepResult;

/// Error type shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Caller-side contract violation (bad dimensions, parameter out of range).
    #[error("invalid input: {0}")]
    Input(String),

    /// A configured capacity limit would be exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// Rejection sampling ran out of attempts.
    #[error("sampling budget exhausted: {0}")]
    Sampling(String),

    /// A numerical routine failed to converge or found no usable answer.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// An internal build-time assertion failed (e.g. a projected generator
    /// missing its required rank). Indicates a bug, not a user error.
    #[error("construction invariant violated: {0}")]
    Construction(String),

    /// A sweep ran out of budget; the completed prefix of the curve is kept.
    #[error("sweep budget exhausted after {} of {} candidate dimensions", partial.curve.len(), partial.candidates)]
    BudgetExhausted { partial: Box<SweepResult> },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
