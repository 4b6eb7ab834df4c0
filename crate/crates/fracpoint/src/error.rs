use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A series or quadrature finished but its estimated error exceeds the
    /// documented bound for the operation.
    #[error("accuracy failure in {op}: estimated error {estimate:.3e} exceeds bound {bound:.3e}")]
    Accuracy {
        op: &'static str,
        estimate: f64,
        bound: f64,
    },

    /// A formal series diverges at the requested point.
    #[error("series divergence in {op} at {at}")]
    Divergent { op: &'static str, at: f64 },

    /// Division by a vanishing quantity, e.g. f(lambda) = 0.
    #[error("singularity in {op}: {msg}")]
    Singular { op: &'static str, msg: String },

    /// Result magnitude exceeds the representable range.
    #[error("overflow in {op}")]
    Overflow { op: &'static str },

    /// The requested moment is infinite for the given process.
    #[error("infinite moment: {msg}")]
    InfiniteMoment { msg: String },

    /// Operation not available for the given configuration (e.g. exact pmf
    /// for more than two superposed subordinators).
    #[error("unsupported: {msg}")]
    Unsupported { msg: String },

    /// Adaptive quadrature failed to reach its tolerance within the node cap.
    #[error("quadrature did not converge in {op}: last difference {diff:.3e}")]
    QuadratureNonConvergence { op: &'static str, diff: f64 },

    /// Rejection sampler would need too many retries to be practical.
    #[error("rejection guard in {op}: expected retries {expected:.3e} exceed 1e4")]
    RetryGuard { op: &'static str, expected: f64 },

    /// Malformed textual encoding (Bernstein function or process spec).
    #[error("parse error: {msg}")]
    Parse { msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        op,
        msg: msg.into(),
    }
}
