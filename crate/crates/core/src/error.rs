use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants are grouped by what went wrong rather than where: bad input,
/// violated hypotheses of a bound, numerical degeneracy, and failed
/// post-condition checks. [`Error::is_degenerate`] tells the CLI which exit
/// code to use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("point is not in the annulus: {0}")]
    OutsideAnnulus(String),

    #[error("matrix is numerically singular (smallest singular value {0:e})")]
    Singular(f64),

    #[error("bisection failed: {0}")]
    Bisection(String),

    #[error("quadrature too coarse: {0}")]
    Quadrature(String),

    #[error("leakage {leakage:e} exceeds tolerance {tolerance:e}")]
    Leakage { leakage: f64, tolerance: f64 },

    #[error("check `{name}` failed: {detail}")]
    Invariant { name: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, domain: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            domain,
        }
    }

    pub(crate) fn invariant(name: &'static str, detail: impl Into<String>) -> Self {
        Error::Invariant {
            name,
            detail: detail.into(),
        }
    }

    /// True for failures caused by numerical trouble rather than bad input
    /// or a failed check.
    pub fn is_degenerate(&self) -> bool {
        matches!(
            self,
            Error::Singular(_) | Error::Bisection(_) | Error::Quadrature(_) | Error::Leakage { .. }
        )
    }

    /// True when a computed quantity failed one of its certified checks.
    pub fn is_check_failure(&self) -> bool {
        matches!(self, Error::Invariant { .. })
    }
}
