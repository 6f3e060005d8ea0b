use thiserror::Error;

use crate::date::TradingDate;

/// Broad classification used by front ends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Caller supplied parameters that violate an operation's preconditions.
    Config,
    /// Input data is malformed or violates a data invariant.
    Data,
    /// A numerical computation could not produce a valid result.
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("line {line}: {message}")]
    Malformed { line: u64, message: String },
    #[error("line {line}: price must be positive, got {price}")]
    NonPositivePrice { line: u64, price: f64 },
    #[error("line {line}: return must exceed -1, got {value}")]
    ReturnOutOfRange { line: u64, value: f64 },
    #[error("duplicate date {0}")]
    DuplicateDate(TradingDate),
    #[error("series `{asset}` has {found} rows, need at least {required}")]
    TooFewRows {
        asset: String,
        found: usize,
        required: usize,
    },
    #[error("series share no common dates")]
    EmptyIntersection,
    #[error("series share only {0} common date(s), need at least 2")]
    IntersectionTooShort(usize),
    #[error("no constituent records fall inside SIC range {lo}..={hi}")]
    EmptySector { lo: u16, hi: u16 },
    #[error("duplicate record for firm `{firm}` on {date}")]
    DuplicateFirmDate { firm: String, date: TradingDate },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("covariance estimator is singular: {periods} periods for {assets} assets")]
    SingularEstimator { assets: usize, periods: usize },
    #[error("degenerate window: {0}")]
    Degenerate(String),
    #[error("covariance is not positive semidefinite (eigenvalue {eigenvalue}, trace {trace})")]
    NotPositiveSemidefinite { eigenvalue: f64, trace: f64 },
    #[error("eigen solver did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("window {index}: {source}")]
    InWindow {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) => ErrorKind::Config,
            Error::SingularEstimator { .. }
            | Error::Degenerate(_)
            | Error::NotPositiveSemidefinite { .. }
            | Error::NoConvergence { .. } => ErrorKind::Numeric,
            Error::InWindow { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn in_window(self, index: usize) -> Error {
        Error::InWindow {
            index,
            source: Box::new(self),
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Error {
        Error::InvalidParameter(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
