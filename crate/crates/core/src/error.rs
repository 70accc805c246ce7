//! Error type shared by every numerical routine in the crate.

use thiserror::Error;

/// Failure modes of the evaluators, integrators and transforms.
///
/// Numerical routines never return NaN silently; they surface one of these.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument sits on (or within tolerance of) a pole.
    #[error("pole: {0}")]
    Pole(String),
    /// Argument outside the domain of the function.
    #[error("domain: {0}")]
    Domain(String),
    /// Parameter outside its admissible range.
    #[error("parameter: {0}")]
    Parameter(String),
    /// A series or iteration failed to converge.
    #[error("divergence: {0}")]
    Divergence(String),
    /// A continuation path violates its clearance.
    #[error("path: {0}")]
    Path(String),
    /// Quadrature refinement exhausted its levels.
    #[error("tolerance: {0}")]
    Tolerance(String),
    /// Evaluation point outside the analyticity strip of a function.
    #[error("strip: {0}")]
    Strip(String),
    /// Transform evaluated outside its analyticity window.
    #[error("window: {0}")]
    Window(String),
    /// Numerical differentiation did not stabilise.
    #[error("step: {0}")]
    Step(String),
    /// File or stream failure.
    #[error("io: {0}")]
    Io(String),
    /// Malformed command-line or configuration input.
    #[error("usage: {0}")]
    Usage(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Returns `Err(Divergence)` unless both components of `z` are finite.
pub(crate) fn finite(z: num_complex::Complex64, what: &str) -> Result<num_complex::Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Divergence(format!("{what} produced a non-finite value")))
    }
}
