use thiserror::Error;

use crate::entropy::Bits;

/// Errors raised by the planners and the models they drive.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A probability, variance or parameter outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The model violated its own contract (empty decision set, missing transition, ...).
    #[error("model error: {0}")]
    Model(String),

    /// A configured size limit was exceeded.
    #[error("resource limit exceeded: {what} (cap {cap})")]
    Resource { what: String, cap: usize },

    /// Factorization or conditioning failed.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// The information target could not be reached within the stage budget.
    #[error("target of {target:.6} bits not reached within {max_stages} stages (best {best:.6} bits)")]
    TargetNotReached {
        target: Bits,
        best: Bits,
        max_stages: usize,
    },

    /// Solver bookkeeping went out of sync; never expected for valid models.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
