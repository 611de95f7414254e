use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NfdmError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// `|a(lambda)|` fell below the singularity threshold; the reflection
    /// coefficient is undefined there.
    #[error("singular spectrum at lambda = {lambda}: |a| = {abs_a:e}")]
    SingularSpectrum { lambda: f64, abs_a: f64 },

    #[error("numerical failure at t = {t}: {reason}")]
    NumericalFailure { t: f64, reason: String },

    /// Signal energy reached the edge of the periodic simulation window.
    #[error("guard violation: {edge_fraction:e} of the energy sits at the grid edges")]
    GuardViolation { edge_fraction: f64 },

    #[error("framing error: {0}")]
    Framing(String),

    #[error("q-factor undefined for Pb = {0} (unmeasurable)")]
    OutOfDomain(f64),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for NfdmError {
    fn from(e: std::io::Error) -> Self {
        NfdmError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NfdmError>;
