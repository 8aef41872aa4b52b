use thiserror::Error;

/// Errors raised by the numerical kernels and the metric evaluators.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A Gamma-type function was evaluated at a non-positive integer.
    #[error("pole at {0}")]
    Pole(f64),

    /// An argument violated a documented precondition.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    /// A density was requested on the boundary of its support.
    #[error("density undefined on the boundary ({0} = 0)")]
    Boundary(&'static str),

    /// A Meijer G shape outside the supported set was requested.
    #[error("unsupported Meijer G shape ({m},{n},{p},{q})")]
    UnsupportedShape { m: usize, n: usize, p: usize, q: usize },

    /// A series or iteration failed to reach its tolerance.
    #[error("no convergence in {what}: {detail}")]
    NoConvergence { what: &'static str, detail: String },

    /// A series was cut at its hard truncation limit before meeting the
    /// stopping rule. `partial` is the value accumulated so far.
    #[error("series truncated at t = {terms} before converging (partial value {partial:e})")]
    Truncated { terms: usize, partial: f64 },

    /// The result is not representable as a finite f64; use the log-scale
    /// variant of the function instead.
    #[error("{0} overflows f64; use the log-scale variant")]
    Overflow(&'static str),

    /// A probability left [0, 1] by more than the clamp allowance.
    #[error("probability {0:e} outside [0, 1]")]
    OutOfRange(f64),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn no_convergence(what: &'static str, detail: impl Into<String>) -> Self {
        Error::NoConvergence {
            what,
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
