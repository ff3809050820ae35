use thiserror::Error;

/// Errors raised by the library.
///
/// The three groups map onto the CLI exit codes: invalid input (config),
/// domain violations and numerical failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("step size underflow at tau = {tau:.6e} (h = {step:.3e}); the system is too stiff for the explicit integrator")]
    StepUnderflow { tau: f64, step: f64 },

    #[error("integration produced a non-finite state at tau = {tau:.6e}")]
    NonFinite { tau: f64 },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for step-size underflow and non-finite states.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::StepUnderflow { .. } | Error::NonFinite { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
