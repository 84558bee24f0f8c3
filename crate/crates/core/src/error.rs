use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Operands or inputs disagree in size (qubit counts, vector lengths, array lengths).
    #[error("size mismatch in {context}: expected {expected}, got {actual}")]
    SizeMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// An argument violates a documented precondition.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    /// An index lies outside the permitted range.
    #[error("{name} = {index} is out of range (must be < {bound})")]
    IndexOutOfRange {
        name: &'static str,
        index: usize,
        bound: usize,
    },

    /// An iterative method exceeded its iteration budget.
    #[error("{method} failed to converge after {iterations} iterations ({detail})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        detail: String,
    },

    /// A transfer amplitude is zero so its sign is undefined.
    #[error("transfer amplitude a[{index}] vanishes; its sign is undefined")]
    DegenerateAmplitude { index: usize },

    /// The Jacobi reconstruction recurrence produced a numerically zero norm.
    #[error("Jacobi reconstruction broke down at step {step} (residual norm {norm:e})")]
    ReconstructionBreakdown { step: usize, norm: f64 },

    /// A matrix that must be symmetric (or persymmetric) is not.
    #[error("matrix is not {property} (deviation {deviation:e})")]
    NotSymmetric {
        property: &'static str,
        deviation: f64,
    },

    /// Problem size exceeds a hard cap.
    #[error("{what} = {size} exceeds the cap of {cap}")]
    TooLarge {
        what: &'static str,
        size: usize,
        cap: usize,
    },

    /// A measured quantity fell below the resolvable floor even in extended precision.
    #[error("splitting at delta = {delta:e} is below the precision floor ({floor:e})")]
    BelowPrecisionFloor { delta: f64, floor: f64 },

    /// A pair that is required to be degenerate at zero perturbation is not.
    #[error("selected pair ({0}, {1}) is not degenerate at zero perturbation (gap {2:e})")]
    NotDegenerate(usize, usize, f64),

    /// A designed transfer fell short of its target fidelity.
    #[error("designed transfer reached fidelity {achieved} < required {required}")]
    TransferShortfall { achieved: f64, required: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
