use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {message}")]
    Argument { name: &'static str, message: String },

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("domain error: {message} at {point:?}")]
    Domain { message: &'static str, point: Vec<f64> },

    #[error("expression is not differentiable at {point:?}")]
    NonDifferentiable { point: Vec<f64> },

    #[error("quadrature did not converge on [{a}, {b}]: estimate {estimate}, error {error}")]
    Quadrature { a: f64, b: f64, estimate: f64, error: f64 },

    #[error("singular point of the radial system at r = {r}")]
    Singularity { r: f64 },

    #[error("step size underflow at r = {r}")]
    StepUnderflow { r: f64 },

    #[error("grid spacing {h} under-resolves the oscillation; need h <= {required}")]
    UnderResolved { h: f64, required: f64 },

    #[error("eigensolver did not converge after {iterations} iterations")]
    Eigensolver { iterations: usize },

    #[error("field vanishes on the cutoff ball of radius {radius}")]
    VanishingField { radius: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

/// Coarse classification used to pick process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Numerical,
    Invariant,
}

impl Error {
    pub(crate) fn arg(name: &'static str, message: impl Into<String>) -> Self {
        Error::Argument { name, message: message.into() }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Argument { .. }
            | Error::Syntax { .. }
            | Error::UnknownIdentifier { .. }
            | Error::UnderResolved { .. } => ErrorClass::Config,
            Error::Invariant(_) => ErrorClass::Invariant,
            _ => ErrorClass::Numerical,
        }
    }
}
