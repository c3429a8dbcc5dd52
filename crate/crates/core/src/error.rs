//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a precondition (non-finite value, bad norm, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The principal logarithm is undefined at -identity; the rotation axis
    /// is arbitrary there and must be chosen by the caller.
    #[error("principal log undefined at -identity (x1 = {x1}); choose an axis explicitly")]
    BranchUndefined { x1: f64 },

    /// The field direction is undefined (zero field or polar-axis field) where
    /// a well-defined azimuth is required.
    #[error("degenerate field: {0}")]
    DegenerateField(String),

    /// A formula was evaluated at a pole of its parameter domain.
    #[error("pole: {0}")]
    Pole(String),

    /// Evaluation outside the range covered by tabulated data.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// A matrix expected to be Hermitian was not, within tolerance.
    #[error("matrix not Hermitian: max asymmetry {defect:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { defect: f64, tolerance: f64 },

    /// Two propagation results cannot be compared (different grids or shapes).
    #[error("comparison mismatch: {0}")]
    Mismatch(String),

    /// The field does not satisfy the integrability conditions for the
    /// requested gamma, so a construction that requires them is refused.
    #[error("not integrable: {0}")]
    NotIntegrable(String),

    /// An internal numerical consistency check failed; indicates a bug or
    /// catastrophically ill-conditioned input.
    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
