//! Painleve layer: the hard-edge Painleve III transcendent and its Bessel
//! determinant closed form, the soft-edge Painleve II Hastings-McLeod
//! solution with the Tracy-Widom cumulative law and its linear correction
//! ODE, and the sigma-form Painleve V residual evaluator.
//!
//! Two solution objects own everything downstream consumers need:
//!
//! * [`PIIISolution`] holds f(x) with two derivatives and the accumulated
//!   log of the limiting hard-edge CDF, produced by [`solve_p3`] (adaptive
//!   embedded Runge-Kutta on the implicit second-order ODE) or cross-checked
//!   against [`bessel_det_f`] for integer exponents.
//! * [`PIISolution`] holds the Hastings-McLeod q(x) with its derivative, the
//!   closed-form h0 integral and the normalized h1 correction, produced by
//!   [`solve_p2_hastings_mcleod`] (fourth-order relaxation with damped
//!   Newton iteration).
//!
//! Solutions are immutable after construction; every evaluator here is a
//! pure function of one of them.

mod interp;
mod p2;
mod p3;

pub use p2::{
    h0_tilde, solve_h1_correction, solve_p2_hastings_mcleod, tw2_cdf, H1Config, H1Solution,
    P2Config, PIISolution,
};
pub use p3::{bessel_det_f, corrected_cdf, limiting_cdf, solve_p3, CorrectedCdf, PIIISolution};

use crate::specialfns::SpecialFnError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PainleveError {
    #[error("domain error: {0}")]
    Domain(String),
    /// The square-root argument of the implicit ODE turned negative beyond
    /// rounding tolerance; the tracked branch no longer exists.
    #[error("branch loss at x = {x:.6e}: square-root argument {value:e}")]
    BranchLoss { x: f64, value: f64 },
    #[error("step size underflow at x = {x:.6e} (h = {h:e})")]
    StepUnderflow { x: f64, h: f64 },
    #[error("x = {x} outside the solution grid [{lo}, {hi}]")]
    GridExceeded { x: f64, lo: f64, hi: f64 },
    #[error("relaxation failed to converge: {iters} iterations, residual {residual:e}")]
    NonConvergence { iters: usize, residual: f64 },
    #[error("determinant certifies only {certified_digits:.1} digits (need 8)")]
    Conditioning { certified_digits: f64 },
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
}

/// Tunables for the adaptive Runge-Kutta integration in [`solve_p3`].
///
/// Defaults: embedded 5(4) stepping at rtol 1e-10 / atol 0 with output
/// reported on a uniform grid of 2001 points, launched from the series at
/// x = 1e-6. Control is relative by default because the state spans many
/// decades (power-law growth from the launch point): any fixed absolute
/// floor would leave the launch region uncontrolled.
#[derive(Debug, Clone)]
pub struct ODESolverConfig {
    /// Relative local error tolerance per step.
    pub rtol: f64,
    /// Absolute local error tolerance per step; zero means purely relative
    /// control, which is safe here because no state component crosses zero.
    pub atol: f64,
    /// Number of reporting grid points (>= 2); steps land exactly on them.
    pub n_report: usize,
    /// Series launch abscissa; the solution below it is the leading term of
    /// the small-x expansion.
    pub x_launch: f64,
    /// Hard cap on accepted + rejected steps.
    pub max_steps: usize,
}

impl Default for ODESolverConfig {
    fn default() -> Self {
        ODESolverConfig {
            rtol: 1e-10,
            atol: 0.0,
            n_report: 2001,
            x_launch: 1e-6,
            max_steps: 2_000_000,
        }
    }
}

impl ODESolverConfig {
    fn validate(&self) -> Result<(), PainleveError> {
        if !(self.rtol > 0.0 && self.atol >= 0.0 && self.rtol.is_finite() && self.atol.is_finite())
        {
            return Err(PainleveError::Domain(
                "rtol must be positive and atol nonnegative".into(),
            ));
        }
        if self.n_report < 2 {
            return Err(PainleveError::Domain(
                "reporting grid needs at least 2 points".into(),
            ));
        }
        if !(self.x_launch > 0.0 && self.x_launch <= 1e-3) {
            return Err(PainleveError::Domain(format!(
                "launch point must lie in (0, 1e-3], got {}",
                self.x_launch
            )));
        }
        Ok(())
    }
}

/// Sigma-form residual of the finite-N log-derivative H at one point:
///
/// (tH'')^2 - 4(H')^2 (H - N(N+a) - tH') - ((2N+a-t)H' + H)^2,
///
/// normalized by the largest absolute value among the three terms. A valid
/// (H, H', H'') triple drives this to zero; the caller supplies derivatives
/// (typically by finite differences over re-runs of the recurrence).
pub fn p5_residual(h: f64, h_prime: f64, h_doubleprime: f64, t: f64, n: u32, a: f64) -> f64 {
    let nf = n as f64;
    let nna = nf * (nf + a);
    let t1 = (t * h_doubleprime).powi(2);
    let t2 = 4.0 * h_prime * h_prime * (h - nna - t * h_prime);
    let t3 = ((2.0 * nf + a - t) * h_prime + h).powi(2);
    let scale = t1.abs().max(t2.abs()).max(t3.abs()).max(f64::MIN_POSITIVE);
    (t1 - t2 - t3) / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_residual_exact_zero_on_a0_solution() {
        // H = -Nt, H' = -N, H'' = 0 solves the sigma form at a = 0; with a
        // dyadic t every term is computed exactly, so the residual is 0.0
        // bit for bit.
        for (n, t) in [(6u32, 0.5f64), (3, 0.25), (12, 1.0), (50, 0.125)] {
            let nf = n as f64;
            let r = p5_residual(-nf * t, -nf, 0.0, t, n, 0.0);
            assert_eq!(r, 0.0, "N={n} t={t}");
        }
    }

    #[test]
    fn p5_residual_generically_nonzero() {
        let r = p5_residual(1.3, -0.7, 2.1, 0.9, 4, 1.5);
        assert!(r.abs() > 1e-6);
    }

    #[test]
    fn p5_residual_is_scale_normalized() {
        // Scaling (H, H', H'') jointly cannot push the residual outside
        // [-3, 3] because the normalizer is the largest term.
        for scale in [1e-8, 1.0, 1e8] {
            let r = p5_residual(1.3 * scale, -0.7 * scale, 2.1 * scale, 0.9, 4, 1.5);
            assert!(r.abs() <= 3.0);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ODESolverConfig::default().validate().is_ok());
        let mut bad = ODESolverConfig::default();
        bad.n_report = 1;
        assert!(bad.validate().is_err());
        let mut bad = ODESolverConfig::default();
        bad.x_launch = 0.1;
        assert!(bad.validate().is_err());
    }
}
