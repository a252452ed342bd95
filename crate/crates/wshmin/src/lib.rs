//! Smallest-eigenvalue distributions of complex Wishart matrices.
//!
//! For an `M x N` matrix `X` with independent standard complex Gaussian
//! entries, `W = X^H X` is a Wishart (Laguerre unitary ensemble) matrix.
//! This crate evaluates the cumulative distribution of the smallest
//! eigenvalue, `F_N(t) = Prob(lambda_min >= t)`, together with its scaling
//! limits and a sampling-based cross-check:
//!
//! * [`op_engine`]: exact finite-`N` evaluation through the recurrence
//!   coefficients of semi-classical Laguerre orthogonal polynomials, driven
//!   by summed Laguerre-Freud relations, with a Hankel-determinant oracle
//!   and algebraic identity validators (Schlesinger relations and the
//!   sigma-form of Painleve V).
//! * [`painleve`]: the hard-edge Painleve III transcendent and its Bessel
//!   determinant closed form, plus the Hastings-McLeod Painleve II solution
//!   feeding the soft-edge Tracy-Widom law and its finite-`N` correction.
//! * [`limits`]: Marchenko-Pastur density, soft-edge scaling parameters and
//!   the hard-edge large-`N` expansion of the recurrence coefficients.
//! * [`montecarlo`]: a deterministic, stream-splittable sampler of
//!   `lambda_min` with empirical-CDF diagnostics and a binary dump format.
//! * [`specialfns`]: the special functions everything above relies on,
//!   evaluated in either standard (f64) or extended (double-double)
//!   precision, selected through [`precision::PrecisionContext`].
//!
//! Rectangularity enters through `a = M - N`, which is treated as a real
//! parameter `a >= 0` everywhere except in the sampler (where `M` must be an
//! integer). All eigenvalue arguments are in the unscaled convention where
//! the joint density carries the weight `lambda^a e^{-lambda}`.

pub mod dd;
pub mod limits;
mod linalg;
pub mod montecarlo;
pub mod op_engine;
pub mod painleve;
pub mod precision;
pub mod real;
pub mod specialfns;

pub use precision::{PrecisionContext, PrecisionMode};
