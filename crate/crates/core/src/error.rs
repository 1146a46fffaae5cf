use thiserror::Error;

/// Errors raised by the solvers, grid evaluators and information measures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for a sector with {len} states")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("overlap matrix is not positive definite at basis size {size}")]
    Conditioning { size: usize },

    #[error("moment table holds orders up to {available}, order {required} requested")]
    MomentTable { required: usize, available: usize },

    #[error("eigenvalue {re} has imaginary part {im:e}")]
    ComplexEigenvalue { re: f64, im: f64 },

    #[error("momentum {requested} lies beyond the resolved bandwidth {resolved}")]
    Bandwidth { requested: f64, resolved: f64 },

    #[error("energy does not change sign on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("input grid lacks a margin of {required} around the requested domain")]
    InsufficientMargin { required: f64 },

    #[error("distribution has zero total weight")]
    DegenerateGrid,

    #[error("expected a {expected} grid, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("densities are sampled on different node sets")]
    MismatchedNodes,
}

impl Error {
    /// True when the error stems from caller input rather than a numerical breakdown.
    pub fn is_invalid_input(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::IndexOutOfRange { .. }
                | Error::Bandwidth { .. }
                | Error::InsufficientMargin { .. }
                | Error::KindMismatch { .. }
                | Error::MismatchedNodes
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
