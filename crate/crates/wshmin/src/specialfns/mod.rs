//! Special functions: log-gamma, upper incomplete gamma, modified Bessel I
//! of integer order, and the Airy function Ai.
//!
//! Public entry points take f64 arguments plus a [`PrecisionContext`] and
//! dispatch to kernels that are generic over the arithmetic backend; the
//! crate-internal `_r` variants expose those kernels directly for callers
//! that already work in a particular backend (the recurrence engine, the
//! Painleve solvers).

mod airy;
mod bessel;
mod gamma;

pub use airy::airy_ai;
pub(crate) use airy::{airy_ai_dd, airy_ai_prime_dd};
pub use bessel::bessel_i;
pub(crate) use bessel::bessel_i_r;
pub use gamma::{ln_upper_incomplete_gamma, log_gamma, upper_incomplete_gamma};
pub(crate) use gamma::{lgamma_r, ln_upper_gamma_r};

use thiserror::Error;

/// Errors shared by all special-function evaluations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    /// Argument outside the mathematical or supported domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A series or continued fraction failed to reach the target accuracy.
    #[error("precision unattainable: {0}")]
    PrecisionUnattainable(String),
}
