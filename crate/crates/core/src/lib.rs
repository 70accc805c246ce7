//! Difference operators acting in the imaginary direction, the gamma-quotient
//! weights they are symmetric against, the classical polynomial families they
//! diagonalise, and the Kontorovich–Lebedev, Wimp, Vilenkin and Mellin
//! transform pairs that turn them into multiplication operators.
//!
//! Every claim the library makes can be re-checked numerically through
//! [`verify`], which is also what the `imdiff verify` command runs.

pub mod cli;
pub mod error;
pub mod extensions;
pub mod polynomials;
pub mod quadrature;
pub mod specfun;
pub mod transforms;
pub mod verify;
pub mod weights_ops;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Shorthand for a complex number with the given parts.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Shorthand for a real number promoted to complex.
#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}
