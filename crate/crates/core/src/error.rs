use thiserror::Error;

/// Errors raised by the geometry, error-model and oracle layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A disparity that no range on the search interval produces.
    #[error(
        "no range produces disparity {disparity_px} px at this bearing; \
         achievable interval is ({min_px}, {max_px}) px"
    )]
    NoSolution {
        disparity_px: f64,
        min_px: f64,
        max_px: f64,
    },

    /// Too many Monte Carlo draws fell outside the invertible disparity interval.
    #[error("monte carlo rejected {rejected} of {samples} samples (limit 1%)")]
    TooManyRejected { rejected: usize, samples: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
