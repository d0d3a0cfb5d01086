//! Error type shared by every module of the solver library.

use thiserror::Error;

/// All failure modes of the solver library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A constructor or operation precondition was violated.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A spring with non-zero free length collapsed to (near) zero length;
    /// the energy gradient has no defined direction there.
    #[error("spring {spring} has length {length:.3e} < 1e-9; energy gradient direction undefined")]
    DegenerateSpring { spring: usize, length: f64 },

    /// The eliminated variable is absent (degree zero) from one of the
    /// polynomials, so no Sylvester matrix can be formed.
    #[error("cannot eliminate: a polynomial has degree 0 in the eliminated variable")]
    DegenerateLeadingCoefficient,

    /// The resultant vanished identically: the parameter point sits on a
    /// positive-dimensional solution locus and discrete root extraction is
    /// meaningless. Callers may retry with the opposite elimination order.
    #[error("eliminant is identically zero (positive-dimensional solution locus)")]
    EliminationDegenerate,

    /// Back-substitution found no partner root consistent with both
    /// polynomials: the eliminant root was spurious.
    #[error("no consistent partner root for eliminant root {value}")]
    InconsistentRoot { value: f64 },

    /// A closed-form branch expression hit a vanishing denominator (the
    /// partner angle escapes to the tan-half point at infinity).
    #[error("closed-form denominator vanished; partner angle degenerates")]
    DenominatorZero,

    /// The symmetric-case solver was invoked on a mechanism that is not
    /// symmetric within tolerance.
    #[error("not symmetric: {0}")]
    NotSymmetric(String),

    /// A parameter-slice specification is unusable.
    #[error("invalid slice: {0}")]
    InvalidSlice(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
