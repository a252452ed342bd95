//! Monte Carlo sampler for the smallest eigenvalue of complex Wishart
//! matrices, with empirical-CDF statistics and a reproducible binary dump
//! format.
//!
//! The sampler draws X as an M x N matrix of independent complex Gaussians
//! and computes lambda_min = sigma_min(X)^2 through a bidiagonal reduction,
//! never forming X^H X. Sample i is a pure function of (seed, i): the RNG
//! is ChaCha12 seeded from the configured seed with the sample index as
//! the stream number. Worker threads only partition the index range, so
//! every output is bit-identical for any `n_streams`.

mod dump;
mod ecdf;
mod sampler;

pub use dump::{
    read_dump, write_dump, DumpHeader, DUMP_HEADER_LEN, DUMP_MAGIC,
    RNG_ID_CHACHA12_STREAM_PER_SAMPLE,
};
pub use ecdf::{correction_diagnostic, ks_distance, CorrectionRow, EmpiricalCDF};
pub use sampler::{draw_samples, profile_phases, sample_min_eig};

use thiserror::Error;

use crate::painleve::PainleveError;

#[derive(Debug, Error)]
pub enum McError {
    #[error("invalid sampler input: {0}")]
    Domain(String),
    #[error("singular-value bisection failed to converge at size {size}; this is a bug")]
    NonConvergence { size: usize },
    #[error("sample dump format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Painleve(#[from] PainleveError),
}

/// Sampling request. The matrix is M x N with M >= N, so the difference
/// M - N plays the role of the (necessarily integer) parameter a.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SamplerConfig {
    /// Matrix columns; the Wishart matrix is N x N.
    pub n: u32,
    /// Matrix rows, at least `n`.
    pub m: u32,
    /// Total number of samples, regardless of `n_streams`.
    pub n_samples: u64,
    pub seed: u64,
    /// Worker threads; affects wall time only, never values or order.
    pub n_streams: u32,
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), McError> {
        if self.n < 1 {
            return Err(McError::Domain("N must be at least 1".into()));
        }
        if self.m < self.n {
            return Err(McError::Domain(format!(
                "M = {} must be at least N = {}",
                self.m, self.n
            )));
        }
        if self.n_samples < 1 {
            return Err(McError::Domain("sample count must be at least 1".into()));
        }
        if self.n_streams < 1 {
            return Err(McError::Domain("stream count must be at least 1".into()));
        }
        Ok(())
    }

    pub fn a(&self) -> f64 {
        f64::from(self.m - self.n)
    }
}
