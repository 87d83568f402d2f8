use thiserror::Error;

use crate::series::SeriesError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("{what} = {value} is outside the supported range {min}..={max}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },
    #[error("{what} exceeds the enumeration cap ({value} > {cap}); raise {env} to override")]
    CapExceeded {
        what: &'static str,
        value: usize,
        cap: usize,
        env: &'static str,
    },
    #[error("coefficient {index} of the matching EGF times (2n)! is not an integer")]
    NonInteger { index: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("no root found: {0}")]
    NoRoot(String),
    #[error("degenerate case: {0}")]
    Degenerate(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Series(_) => "series",
            Error::OutOfRange { .. } => "out_of_range",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::NonInteger { .. } => "non_integer",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::NoRoot(_) => "no_root",
            Error::Degenerate(_) => "degenerate",
        }
    }

    /// Errors caused by the request rather than by the computation.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::OutOfRange { .. } | Error::CapExceeded { .. } | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_range(what: &'static str, value: usize, min: usize, max: usize) -> Result<()> {
    if (min..=max).contains(&value) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            what,
            value,
            min,
            max,
        })
    }
}
