//! Error type shared by every module of the crate.
//!
//! Numerical routines distinguish *domain* errors (the caller asked for
//! something outside the mathematical domain of an operation) from
//! *numerical* failures (the operation is well posed but the requested
//! accuracy could not be certified).  Numerical failures always carry the
//! accuracy that *was* achieved so callers can decide whether to retry with
//! looser targets or propagate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is not defined for the given variant or configuration
    /// (for example a closed-form kernel requested from a subordinator that
    /// only exposes its Laplace symbol).
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A numerical routine could not certify the requested accuracy.
    #[error("numerical failure in {stage}: achieved {achieved:.3e}, target {target:.3e}")]
    Numerical {
        stage: &'static str,
        achieved: f64,
        target: f64,
    },

    /// A root- or level-search could not bracket its target.
    #[error("no bracket for level {level} on [{lo}, {hi}] (values {f_lo:.6e}, {f_hi:.6e})")]
    NoBracket {
        level: f64,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// A fit or report was requested from data that cannot support it.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A sample-path simulation exceeded its step budget before crossing.
    #[error("step budget exhausted after {steps} steps (t = {t}, step = {step})")]
    StepBudget { steps: u64, t: f64, step: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Convenience constructor for domain errors.
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Convenience constructor for unsupported-operation errors.
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}
