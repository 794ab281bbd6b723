//! Error taxonomy shared across the crate.
//!
//! Three broad categories map onto the CLI exit codes: configuration problems
//! (bad input files, invalid parameter combinations), numeric failures
//! (quadrature non-convergence, overflow, domain violations), and validation
//! failures (the `validate` verb found a reference mismatch).

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed (non-convergence, overflow, loss of
    /// precision beyond the advertised accuracy).
    #[error("numeric error: {0}")]
    Numeric(String),

    /// Invalid configuration: file syntax, missing fields, or values that
    /// violate a type invariant.
    #[error("config error: {0}")]
    Config(String),

    /// A validation run found computed values outside their tolerances.
    #[error("validation failed: {0}")]
    Validation(String),

    /// Filesystem or serialization problem while reading configs or writing
    /// experiment outputs. Carries its own context (usually the path) since
    /// a bare OS error is useless in a batch run.
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 numeric/domain, 4 validation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::Domain(_) | Error::Numeric(_) => 3,
            Error::Validation(_) => 4,
        }
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
