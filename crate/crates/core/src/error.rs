use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// The variants are grouped so that a front end can map each class onto a
/// distinct process exit status (see [`Error::class`]).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("spec has a nonzero plane part and is not radial")]
    NotRadial,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("numeric budget exceeded: {0}")]
    Budget(String),

    #[error("parse error: {0}")]
    Parse(String),
}

/// Coarse error classes, one per CLI exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or inconsistent input (exit 2).
    Input,
    /// Well-formed input outside what the closed forms or renderer support (exit 3).
    Unsupported,
    /// Quadrature, Monte Carlo or series evaluation ran out of budget (exit 4).
    Numeric,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::DimensionMismatch { .. }
            | Error::Input(_)
            | Error::Domain(_)
            | Error::Parse(_) => ErrorClass::Input,
            Error::NotRadial | Error::Unsupported(_) => ErrorClass::Unsupported,
            Error::Numeric(_) | Error::Budget(_) => ErrorClass::Numeric,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
