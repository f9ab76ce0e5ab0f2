use alloc::string::String;
use core::fmt;

/// Failures reported by the library.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Malformed or out-of-domain input.
    InvalidInput(String),
    /// A computation would exceed its configured budget.
    Budget(String),
    /// A node produced no admissible children.
    EmptyBand(String),
    /// The direction hits the cusp exactly; the profile has no peak.
    HitsCusp(String),
    /// An invariant check failed on constructed data.
    Validation(String),
    /// A covering check found an uncovered grid point.
    Uncovered(f64),
    /// Numerical guard tripped.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(m) => write!(f, "invalid input: {m}"),
            Error::Budget(m) => write!(f, "budget exceeded: {m}"),
            Error::EmptyBand(m) => write!(f, "empty child band: {m}"),
            Error::HitsCusp(m) => write!(f, "direction hits the cusp {m}"),
            Error::Validation(m) => write!(f, "validation failed: {m}"),
            Error::Uncovered(x) => write!(f, "grid point {x} is not covered"),
            Error::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
