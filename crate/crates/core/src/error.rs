use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid construction parameters (grid bounds, widths, weights, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation was called on a value that violates its preconditions,
    /// e.g. a momentum-space state handed to a position-space operation.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Two operands live on different grids.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// The requested computation falls outside the numerical regime in which
    /// the result can be trusted (packet escaping the grid, unresolved
    /// kernel oscillation, ...). The message says what grid would be needed.
    #[error("regime refusal: {0}")]
    Regime(String),
}

impl Error {
    pub fn is_regime(&self) -> bool {
        matches!(self, Error::Regime(_))
    }
}
