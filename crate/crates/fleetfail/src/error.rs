//! Crate-wide error type.
//!
//! Variants are grouped by failure mode rather than by module: parse errors
//! carry the line they came from, numeric routines report degenerate input or
//! non-convergence (with the iterate trace), and the logistic fit
//! distinguishes perfect separation from a singular design matrix.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of an input stream failed to parse or validate. The message
    /// names the offending field when one is known.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A structured ticket is missing a mandatory `key:` line.
    #[error("ticket missing mandatory key `{key}`")]
    MissingKey { key: &'static str },

    /// A record violates a structural invariant (e.g. an interval that ends
    /// before it starts).
    #[error("{0}")]
    InvalidRecord(String),

    /// An operation that needs data received none.
    #[error("empty input: {0}")]
    Empty(String),

    /// An argument violates the operation's documented precondition.
    #[error("{0}")]
    Precondition(String),

    /// The sample carries no information for the requested estimator
    /// (zero log-spread, constant values, ...).
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    /// An iterative solver ran out of iterations. `trace` holds the iterates
    /// visited, most recent last.
    #[error("{what} did not converge after {} iterations", trace.len())]
    NonConvergence { what: String, trace: Vec<f64> },

    /// The logistic fit detected perfect separation: some linear combination
    /// of the factors classifies the labels exactly, so the MLE diverges.
    #[error("separation: labels are perfectly separable, coefficients diverge")]
    Separation,

    /// The design matrix is rank-deficient (a factor is constant or an exact
    /// linear combination of others).
    #[error("singular design matrix")]
    Singular,

    /// A lifecycle curve does not exhibit the rise/fall/flat/rise template.
    #[error("phases not identifiable: {0}")]
    PhasesNotIdentifiable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidRecord(msg.into())
    }

    pub(crate) fn empty(msg: impl Into<String>) -> Self {
        Error::Empty(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
