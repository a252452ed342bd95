//! Soft-edge layer: the Hastings-McLeod solution of Painleve II,
//! q'' = xq + 2q^3 with q ~ Ai(x) as x -> +infinity, the Tracy-Widom
//! cumulative law F2, and the linear second-order ODE for the h1 correction.
//!
//! The transcendent is found as a two-point boundary-value problem: marching
//! the equation as an initial-value problem is exponentially unstable in
//! both directions (perturbations grow like exp((2 sqrt 2 / 3)|x|^{3/2})
//! left of the origin and like 1/Ai(x) right of it), while the relaxation
//! form distributes both boundary layers stably. Discretization is the
//! fourth-order Numerov stencil; the nonlinear system is solved by damped
//! Newton iteration with a tridiagonal (Thomas) linear solve per step. The
//! left boundary value comes from the dominant balance
//! q ~ sqrt(-x/2)(1 + 1/(8x^3) - 73/(128 x^6)); its truncation error decays
//! into the domain like the left boundary layer and is invisible away from
//! the first half unit of the grid.

use super::{interp, PainleveError};
use crate::specialfns::{airy_ai_dd, airy_ai_prime_dd};

/// Mesh and iteration controls for [`solve_p2_hastings_mcleod`].
#[derive(Debug, Clone)]
pub struct P2Config {
    /// Left end of the solve domain, in [-8, -2].
    pub x_min: f64,
    /// Right end of the solve domain, in [4, 10].
    pub x_max: f64,
    /// Target mesh spacing; the actual spacing divides the domain evenly.
    pub step: f64,
    /// Damped-Newton iteration cap.
    pub max_iters: usize,
    /// Convergence threshold on the sup-norm of the Newton update.
    pub tol: f64,
}

impl Default for P2Config {
    fn default() -> Self {
        P2Config {
            x_min: -8.0,
            x_max: 10.0,
            step: 5e-4,
            max_iters: 25,
            tol: 1e-10,
        }
    }
}

/// Amplitude convention for the h1 correction solve.
#[derive(Debug, Clone)]
pub struct H1Config {
    /// Scale A of the tail seed A x^{-1/2} exp(-(4/3) x^{3/2}). The
    /// analysis producing the ODE leaves A undetermined; it is a free
    /// normalization here, never a derived quantity.
    pub amplitude: f64,
}

impl Default for H1Config {
    fn default() -> Self {
        H1Config { amplitude: 1.0 }
    }
}

/// h1 correction on the grid of the parent [`PIISolution`].
#[derive(Debug, Clone)]
pub struct H1Solution {
    pub values: Vec<f64>,
    pub amplitude: f64,
    /// First abscissa (marching right to left) where the leading ODE
    /// coefficient h0'' was negligible against the lower-order ones; the
    /// march continues, but values left of it deserve suspicion.
    pub degenerate_at: Option<f64>,
}

/// Hastings-McLeod solution with everything the soft-edge consumers need.
#[derive(Debug, Clone)]
pub struct PIISolution {
    pub grid: Vec<f64>,
    pub q: Vec<f64>,
    pub q_prime: Vec<f64>,
    /// h0(x) = integral_x^inf q^2, through the closed form q'^2 - q^4 - xq^2.
    pub h0_tilde: Vec<f64>,
    /// h1 correction under the recorded amplitude convention.
    pub h1_tilde: Vec<f64>,
    pub h1_amplitude_convention: String,
    /// integral_{x_i}^inf h0, with the tail beyond the grid summed in
    /// closed form from the Airy asymptotics; -ln F2 at the nodes.
    pub(crate) cum_h0: Vec<f64>,
}

fn airy_pair_f64(x: f64) -> Result<(f64, f64), PainleveError> {
    Ok((airy_ai_dd(x)?.to_f64(), airy_ai_prime_dd(x)?.to_f64()))
}

/// Dominant-balance left boundary value.
fn left_asymptotic(x: f64) -> f64 {
    let x3 = x * x * x;
    (-x / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * x3) - 73.0 / (128.0 * x3 * x3))
}

/// Tridiagonal solve (Thomas algorithm); diagonals are overwritten.
fn thomas(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    }
}

/// Numerov defect of the interior equations for the full node vector q.
fn numerov_defect(grid: &[f64], q: &[f64], h: f64, out: &mut [f64]) {
    let g = |i: usize| grid[i] * q[i] + 2.0 * q[i] * q[i] * q[i];
    let w = h * h / 12.0;
    for i in 1..grid.len() - 1 {
        out[i - 1] = q[i - 1] - 2.0 * q[i] + q[i + 1] - w * (g(i - 1) + 10.0 * g(i) + g(i + 1));
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}

/// Fourth-order first derivative of a uniformly sampled array, one-sided at
/// the edges.
fn derivative_table(vals: &[f64], h: f64) -> Vec<f64> {
    let n = vals.len();
    let mut out = vec![0.0; n];
    let d = 12.0 * h;
    out[0] = (-25.0 * vals[0] + 48.0 * vals[1] - 36.0 * vals[2] + 16.0 * vals[3] - 3.0 * vals[4]) / d;
    out[1] = (-3.0 * vals[0] - 10.0 * vals[1] + 18.0 * vals[2] - 6.0 * vals[3] + vals[4]) / d;
    for i in 2..n - 2 {
        out[i] = (-vals[i + 2] + 8.0 * vals[i + 1] - 8.0 * vals[i - 1] + vals[i - 2]) / d;
    }
    out[n - 2] = (3.0 * vals[n - 1] + 10.0 * vals[n - 2] - 18.0 * vals[n - 3] + 6.0 * vals[n - 4]
        - vals[n - 5])
        / d;
    out[n - 1] = (25.0 * vals[n - 1] - 48.0 * vals[n - 2] + 36.0 * vals[n - 3] - 16.0 * vals[n - 4]
        + 3.0 * vals[n - 5])
        / d;
    out
}

/// Solves the Hastings-McLeod boundary-value problem and assembles the
/// solution object, including the h0 closed form, its cumulative integral
/// (Airy tail in closed form) and the h1 correction at unit amplitude.
pub fn solve_p2_hastings_mcleod(config: &P2Config) -> Result<PIISolution, PainleveError> {
    if !(-8.0..=-2.0).contains(&config.x_min) || !(4.0..=10.0).contains(&config.x_max) {
        return Err(PainleveError::Domain(format!(
            "domain must satisfy x_min in [-8, -2], x_max in [4, 10], got [{}, {}]",
            config.x_min, config.x_max
        )));
    }
    if !(1e-5..=1e-2).contains(&config.step) {
        return Err(PainleveError::Domain(format!(
            "mesh step must lie in [1e-5, 1e-2], got {}",
            config.step
        )));
    }

    let m = ((config.x_max - config.x_min) / config.step).round() as usize;
    let h = (config.x_max - config.x_min) / m as f64;
    let mut grid: Vec<f64> = (0..=m).map(|i| config.x_min + i as f64 * h).collect();
    grid[m] = config.x_max;

    let (ai_r, aip_r) = airy_pair_f64(config.x_max)?;

    // Initial guess: the left dominant balance glued to a crude Airy-type
    // envelope; damped Newton tolerates the seam error.
    let mut q: Vec<f64> = grid
        .iter()
        .map(|&x| {
            if x <= 0.0 {
                (0.126 - x / 2.0).sqrt()
            } else {
                0.355 * (-(2.0 / 3.0) * x.powf(1.5)).exp() / (1.0 + x).powf(0.25)
            }
        })
        .collect();
    q[0] = left_asymptotic(config.x_min);
    q[m] = ai_r;

    let mut defect = vec![0.0; m - 1];
    let mut trial = q.clone();
    numerov_defect(&grid, &q, h, &mut defect);
    let mut defect_norm = sup_norm(&defect);

    let w = h * h / 12.0;
    let mut converged = false;
    let mut iters = 0;
    for _ in 0..config.max_iters {
        iters += 1;
        let gp = |qi: f64, xi: f64| xi + 6.0 * qi * qi;
        let mut sub = vec![0.0; m - 1];
        let mut diag = vec![0.0; m - 1];
        let mut sup = vec![0.0; m - 1];
        for i in 1..m {
            diag[i - 1] = -2.0 - 10.0 * w * gp(q[i], grid[i]);
            if i > 1 {
                sub[i - 1] = 1.0 - w * gp(q[i - 1], grid[i - 1]);
            }
            if i < m - 1 {
                sup[i - 1] = 1.0 - w * gp(q[i + 1], grid[i + 1]);
            }
        }
        let mut delta: Vec<f64> = defect.iter().map(|&f| -f).collect();
        thomas(&sub, &mut diag, &sup, &mut delta);

        // Backtracking line search on the defect norm.
        let mut lambda = 1.0;
        loop {
            trial.copy_from_slice(&q);
            for i in 1..m {
                trial[i] += lambda * delta[i - 1];
            }
            numerov_defect(&grid, &trial, h, &mut defect);
            let norm = sup_norm(&defect);
            if norm < defect_norm || lambda < 1e-4 {
                q.copy_from_slice(&trial);
                defect_norm = norm;
                break;
            }
            lambda *= 0.5;
        }

        if lambda * sup_norm(&delta) <= config.tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(PainleveError::NonConvergence {
            iters,
            residual: defect_norm,
        });
    }

    let q_prime = derivative_table(&q, h);
    let h0_tilde: Vec<f64> = (0..=m)
        .map(|i| q_prime[i] * q_prime[i] - q[i].powi(4) - grid[i] * q[i] * q[i])
        .collect();

    // Tail of integral h0 beyond x_max, from the Airy closed form
    // integral_s^inf integral_x^inf Ai^2 = (2s^2 Ai^2 - 2s Ai'^2 - Ai Ai')/3.
    let s = config.x_max;
    let tail = (2.0 * s * s * ai_r * ai_r - 2.0 * s * aip_r * aip_r - ai_r * aip_r) / 3.0;
    let mut cum_h0 = vec![0.0; m + 1];
    cum_h0[m] = tail;
    for i in (0..m).rev() {
        // Corrected trapezoid with the exact derivative h0' = -q^2.
        let seg = 0.5 * h * (h0_tilde[i] + h0_tilde[i + 1])
            + h * h / 12.0 * (-q[i] * q[i] + q[i + 1] * q[i + 1]);
        cum_h0[i] = cum_h0[i + 1] + seg;
    }

    let (h1_tilde, _) = march_h1(&grid, &q, &q_prime, h, 1.0);

    Ok(PIISolution {
        grid,
        q,
        q_prime,
        h0_tilde,
        h1_tilde,
        h1_amplitude_convention:
            "tail seed A x^(-1/2) exp(-(4/3) x^(3/2)) with A = 1 at x = x_max".into(),
        cum_h0,
    })
}

/// Coefficients of the linear correction ODE alpha y'' + beta y' + gamma y = 0
/// expressed through q: alpha = h0'' = -2qq', beta = 2(q'^2 + 2q^4 + xq^2),
/// gamma = h0''' ... = -2q^2 (all from h0' = -q^2 and the Painleve II
/// relation).
fn h1_coefficients(x: f64, q: f64, qp: f64) -> (f64, f64, f64) {
    let q2 = q * q;
    (
        -2.0 * q * qp,
        2.0 * (qp * qp + 2.0 * q2 * q2 + x * q2),
        -2.0 * q2,
    )
}

/// Right-to-left fourth-order Runge-Kutta march of the correction ODE.
/// Marching toward -infinity is the stable direction: the solution sought
/// grows like exp(+(4/3)|dx|^{3/2}-ish) relative to the contaminating
/// fundamental solution (~ sqrt x), so seed error is damped out.
fn march_h1(grid: &[f64], q: &[f64], qp: &[f64], h: f64, amplitude: f64) -> (Vec<f64>, Option<f64>) {
    let m = grid.len() - 1;
    let x_end = grid[m];
    let mut vals = vec![0.0; m + 1];
    let mut degenerate_at = None;

    let mut y = amplitude * x_end.powf(-0.5) * (-(4.0 / 3.0) * x_end.powf(1.5)).exp();
    let mut v = y * (-2.0 * x_end.sqrt() - 0.5 / x_end);
    vals[m] = y;

    // q, q' between nodes by cubic Hermite; q'' = xq + 2q^3 supplies the
    // derivative data for q'.
    let qpp = |i: usize| grid[i] * q[i] + 2.0 * q[i] * q[i] * q[i];
    let mid = |i: usize| {
        let qm = interp::cubic(0.5, h, q[i], qp[i], q[i + 1], qp[i + 1]);
        let qpm = interp::cubic(0.5, h, qp[i], qpp(i), qp[i + 1], qpp(i + 1));
        (qm, qpm)
    };

    let check_degenerate = |x: f64, alpha: f64, beta: f64, gamma: f64, deg: &mut Option<f64>| {
        if deg.is_none() && alpha.abs() <= 1e-14 * (beta.abs() + gamma.abs() * (1.0 + x.abs())) {
            *deg = Some(x);
        }
    };

    for i in (0..m).rev() {
        // Step from node i+1 to node i (step -h).
        let (x1, x0) = (grid[i + 1], grid[i]);
        let xm = 0.5 * (x0 + x1);
        let (qm, qpm) = mid(i);

        let eval = |x: f64, qx: f64, qpx: f64, y: f64, v: f64, deg: &mut Option<f64>| {
            let (alpha, beta, gamma) = h1_coefficients(x, qx, qpx);
            check_degenerate(x, alpha, beta, gamma, deg);
            (v, -(beta * v + gamma * y) / alpha)
        };

        let hh = -h;
        let (k1y, k1v) = eval(x1, q[i + 1], qp[i + 1], y, v, &mut degenerate_at);
        let (k2y, k2v) = eval(xm, qm, qpm, y + 0.5 * hh * k1y, v + 0.5 * hh * k1v, &mut degenerate_at);
        let (k3y, k3v) = eval(xm, qm, qpm, y + 0.5 * hh * k2y, v + 0.5 * hh * k2v, &mut degenerate_at);
        let (k4y, k4v) = eval(x0, q[i], qp[i], y + hh * k3y, v + hh * k3v, &mut degenerate_at);

        y += hh / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        v += hh / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        vals[i] = y;
    }

    (vals, degenerate_at)
}

/// Re-solves the h1 correction under a caller-chosen amplitude convention.
/// The ODE is linear and homogeneous, so values scale exactly with the
/// amplitude (bit for bit when the ratio is a power of two).
pub fn solve_h1_correction(p2: &PIISolution, config: &H1Config) -> Result<H1Solution, PainleveError> {
    if !(config.amplitude.is_finite() && config.amplitude != 0.0) {
        return Err(PainleveError::Domain(format!(
            "amplitude must be finite and nonzero, got {}",
            config.amplitude
        )));
    }
    // Recompute the spacing exactly as the parent solve did, so reruns of
    // the march are bit-for-bit rescalings of the stored one.
    let h = p2.spacing();
    let (values, degenerate_at) = march_h1(&p2.grid, &p2.q, &p2.q_prime, h, config.amplitude);
    Ok(H1Solution {
        values,
        amplitude: config.amplitude,
        degenerate_at,
    })
}

impl PIISolution {
    fn spacing(&self) -> f64 {
        (self.grid[self.grid.len() - 1] - self.grid[0]) / (self.grid.len() - 1) as f64
    }

    fn locate(&self, x: f64) -> Result<(usize, f64), PainleveError> {
        let lo = self.grid[0];
        let hi = self.grid[self.grid.len() - 1];
        let slack = 1e-12 * (1.0 + hi.abs() + lo.abs());
        if !x.is_finite() || x < lo - slack || x > hi + slack {
            return Err(PainleveError::GridExceeded { x, lo, hi });
        }
        let dx = self.spacing();
        let i = ((((x - lo) / dx).floor()) as usize).min(self.grid.len() - 2);
        let s = ((x - self.grid[i]) / dx).clamp(0.0, 1.0);
        Ok((i, s))
    }

    /// q(x) by cubic Hermite interpolation between nodes.
    pub fn q_at(&self, x: f64) -> Result<f64, PainleveError> {
        let (i, s) = self.locate(x)?;
        Ok(interp::cubic(
            s,
            self.spacing(),
            self.q[i],
            self.q_prime[i],
            self.q[i + 1],
            self.q_prime[i + 1],
        ))
    }

    /// integral_x^inf h0, interpolated between nodes (derivative -h0 known).
    pub(crate) fn cum_h0_at(&self, x: f64) -> Result<f64, PainleveError> {
        let (i, s) = self.locate(x)?;
        let d = |j: usize| -self.h0_tilde[j];
        Ok(interp::cubic(
            s,
            self.spacing(),
            self.cum_h0[i],
            d(i),
            self.cum_h0[i + 1],
            d(i + 1),
        ))
    }

    /// integral_x^inf h1: trapezoid over the nodes above x plus the partial
    /// first interval, with the tail beyond the grid summed in closed form
    /// (the log-derivative of h1 is -2 sqrt(u) - 1/u out there, so the
    /// remainder is h1(x_max)/(2 sqrt(x_max)) to leading order).
    pub(crate) fn h1_integral_from(&self, x: f64) -> Result<f64, PainleveError> {
        let (i, s) = self.locate(x)?;
        let h = self.spacing();
        let n = self.grid.len();
        let v_x = self.h1_tilde[i] * (1.0 - s) + self.h1_tilde[i + 1] * s;
        let mut total = 0.5 * (v_x + self.h1_tilde[i + 1]) * h * (1.0 - s);
        for j in i + 1..n - 1 {
            total += 0.5 * (self.h1_tilde[j] + self.h1_tilde[j + 1]) * h;
        }
        let x_max = self.grid[n - 1];
        total += self.h1_tilde[n - 1] / (2.0 * x_max.sqrt());
        Ok(total)
    }
}

/// h0(x) = integral_x^inf q^2, evaluated from the stored closed form with
/// cubic Hermite between nodes (its derivative -q^2 is known exactly).
pub fn h0_tilde(p2: &PIISolution, x: f64) -> Result<f64, PainleveError> {
    let (i, s) = p2.locate(x)?;
    let d = |j: usize| -p2.q[j] * p2.q[j];
    Ok(interp::cubic(
        s,
        p2.spacing(),
        p2.h0_tilde[i],
        d(i),
        p2.h0_tilde[i + 1],
        d(i + 1),
    ))
}

/// Tracy-Widom cumulative law F2(s) = exp(-integral_s^inf h0(u) du).
pub fn tw2_cdf(p2: &PIISolution, s: f64) -> Result<f64, PainleveError> {
    Ok((-p2.cum_h0_at(s)?).exp().min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn solve_default() -> PIISolution {
        solve_p2_hastings_mcleod(&P2Config::default()).unwrap()
    }

    #[test]
    fn matches_airy_on_the_right() {
        let p2 = solve_default();
        let (ai6, _) = airy_pair_f64(6.0).unwrap();
        assert!(
            (p2.q_at(6.0).unwrap() - ai6).abs() <= 1e-8,
            "q(6) = {}, Ai(6) = {}",
            p2.q_at(6.0).unwrap(),
            ai6
        );
    }

    #[test]
    fn matches_dominant_balance_on_the_left() {
        let p2 = solve_default();
        let target = (8.0f64 / 2.0).sqrt();
        let got = p2.q[0];
        assert!((got - target).abs() <= 0.02 * target, "q(-8) = {got}");
    }

    #[test]
    fn value_at_origin() {
        // Frozen from an independent shooting solve at tighter tolerance.
        let p2 = solve_default();
        assert_abs_diff_eq!(p2.q_at(0.0).unwrap(), 0.36706155, epsilon = 1e-4);
    }

    #[test]
    fn positive_and_decreasing() {
        let p2 = solve_default();
        for i in 0..p2.grid.len() {
            assert!(p2.q[i] > 0.0, "q[{i}] = {}", p2.q[i]);
            if i > 0 {
                assert!(p2.q[i] < p2.q[i - 1]);
            }
        }
    }

    #[test]
    fn plugback_residual() {
        // Five-point second difference vs xq + 2q^3, interior nodes.
        let p2 = solve_default();
        let h = p2.spacing();
        let n = p2.grid.len();
        let mut worst = 0.0f64;
        for i in (2..n - 2).step_by(97) {
            let qpp = (-p2.q[i + 2] + 16.0 * p2.q[i + 1] - 30.0 * p2.q[i] + 16.0 * p2.q[i - 1]
                - p2.q[i - 2])
                / (12.0 * h * h);
            let rhs = p2.grid[i] * p2.q[i] + 2.0 * p2.q[i].powi(3);
            let scale = qpp.abs().max(rhs.abs()).max(1.0);
            worst = worst.max((qpp - rhs).abs() / scale);
        }
        assert!(worst <= 1e-6, "residual {worst:e}");
    }

    #[test]
    fn h1_integral_consistent_with_values() {
        // d/dx integral_x^inf h1 = -h1(x), checked by central differences
        // at integer abscissas (which land on grid nodes).
        let p2 = solve_default();
        let h = p2.spacing();
        for &x in &[-4.0f64, 0.0, 2.0] {
            let idx = ((x - p2.grid[0]) / h).round() as usize;
            let val = p2.h1_tilde[idx];
            let d = 0.01;
            let deriv = (p2.h1_integral_from(x - d).unwrap()
                - p2.h1_integral_from(x + d).unwrap())
                / (2.0 * d);
            assert!(
                (deriv - val).abs() <= 1e-2 * val.abs(),
                "x = {x}: derivative {deriv} vs h1 {val}"
            );
        }
    }

    #[test]
    fn h0_identity_against_quadrature() {
        // Closed form q'^2 - q^4 - xq^2 vs direct integration of q^2 with
        // the Airy tail; this is the identity the cumulative law rests on.
        let p2 = solve_default();
        let h = p2.spacing();
        let m = p2.grid.len() - 1;
        let (ai, aip) = airy_pair_f64(p2.grid[m]).unwrap();
        let mut tail = aip * aip - p2.grid[m] * ai * ai;
        let mut worst = 0.0f64;
        for i in (0..m).rev() {
            // Corrected trapezoid of q^2 with exact derivative 2qq'.
            let seg = 0.5 * h * (p2.q[i] * p2.q[i] + p2.q[i + 1] * p2.q[i + 1])
                + h * h / 12.0
                    * (2.0 * p2.q[i] * p2.q_prime[i] - 2.0 * p2.q[i + 1] * p2.q_prime[i + 1]);
            tail += seg;
            if p2.grid[i] <= 8.0 {
                worst = worst.max((tail - p2.h0_tilde[i]).abs());
            }
        }
        assert!(worst <= 1e-8, "identity residual {worst:e}");
    }

    #[test]
    fn h0_nonnegative_decreasing_and_consistent() {
        let p2 = solve_default();
        for i in 0..p2.grid.len() {
            assert!(p2.h0_tilde[i] >= -1e-12);
            if i > 0 {
                assert!(p2.h0_tilde[i] <= p2.h0_tilde[i - 1] + 1e-12);
            }
        }
        // d/dx h0 = -q^2 by central differences on the interpolant.
        let fd = 1e-3;
        for x in [-6.0, -3.0, -1.0, 0.0, 1.5, 4.0] {
            let d = (h0_tilde(&p2, x + fd).unwrap() - h0_tilde(&p2, x - fd).unwrap()) / (2.0 * fd);
            let q = p2.q_at(x).unwrap();
            assert!((d + q * q).abs() <= 1e-6, "x={x}: d={d}, -q^2={}", -q * q);
        }
    }

    #[test]
    fn tw2_cdf_shape() {
        let p2 = solve_default();
        assert!((tw2_cdf(&p2, 10.0).unwrap() - 1.0).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 0..=90 {
            let s = -8.0 + 0.2 * i as f64;
            if s > 10.0 {
                break;
            }
            let v = tw2_cdf(&p2, s).unwrap();
            assert!((0.0..=1.0).contains(&v));
            assert!(v >= prev - 1e-15, "s={s}");
            prev = v;
        }
        assert!(matches!(
            tw2_cdf(&p2, -9.0),
            Err(PainleveError::GridExceeded { .. })
        ));
    }

    #[test]
    fn tw2_cdf_two_route_agreement() {
        // Direct quadrature of (x - s) q^2 against the cumulative-h0 route.
        let p2 = solve_default();
        let s = 0.0;
        let h = p2.spacing();
        let m = p2.grid.len() - 1;
        let x_end = p2.grid[m];
        let (ai, aip) = airy_pair_f64(x_end).unwrap();
        let tail_h0 = (2.0 * x_end * x_end * ai * ai - 2.0 * x_end * aip * aip - ai * aip) / 3.0;
        let tail_q2 = aip * aip - x_end * ai * ai;
        // integral_{x_end}^inf (x - s) q^2 = tail_h0 + (x_end - s) tail_q2.
        let mut total = tail_h0 + (x_end - s) * tail_q2;
        let i0 = p2
            .grid
            .iter()
            .position(|&x| (x - s).abs() < 1e-9)
            .expect("s on a node");
        for i in i0..m {
            let w0 = (p2.grid[i] - s) * p2.q[i] * p2.q[i];
            let w1 = (p2.grid[i + 1] - s) * p2.q[i + 1] * p2.q[i + 1];
            let d0 = p2.q[i] * (p2.q[i] + 2.0 * (p2.grid[i] - s) * p2.q_prime[i]);
            let d1 = p2.q[i + 1] * (p2.q[i + 1] + 2.0 * (p2.grid[i + 1] - s) * p2.q_prime[i + 1]);
            total += 0.5 * h * (w0 + w1) + h * h / 12.0 * (d0 - d1);
        }
        let route_quad = (-total).exp();
        let route_h0 = tw2_cdf(&p2, s).unwrap();
        assert_abs_diff_eq!(route_quad, route_h0, epsilon = 1e-5);
    }

    #[test]
    fn h1_exact_linearity() {
        let p2 = solve_default();
        let doubled = solve_h1_correction(&p2, &H1Config { amplitude: 2.0 }).unwrap();
        for (a, b) in p2.h1_tilde.iter().zip(doubled.values.iter()) {
            assert_eq!(2.0 * a, *b);
        }
        assert!(doubled.degenerate_at.is_none());
    }

    #[test]
    fn h1_tail_shape() {
        // The decaying solution of the correction ODE goes like
        // x^{-1} exp(-(4/3) x^{3/2}): the quick characteristic balance that
        // suggests the power -1/2 drops the y''-subleading term, which
        // enters at the same order as the zeroth-order coefficient. Fit
        // the local algebraic power on [8, 9] after stripping the
        // exponential; it must resolve -1 against -1/2.
        let p2 = solve_default();
        let node = |x: f64| {
            p2.grid
                .iter()
                .position(|&g| (g - x).abs() < 1e-9)
                .expect("x on a node")
        };
        let (i8, i9) = (node(8.0), node(9.0));
        let strip = |i: usize| {
            let x = p2.grid[i];
            p2.h1_tilde[i].ln() + (4.0 / 3.0) * x.powf(1.5)
        };
        let power = (strip(i9) - strip(i8)) / (9.0f64 / 8.0).ln();
        assert!((power + 1.0).abs() <= 0.15, "fitted tail power {power}");

        // Amplitude check against the x^{-1} form, with the amplitude
        // implied by the seed convention at x_max = 10 (value 10^{-1/2} e^-..
        // corresponds to A_eff = sqrt(10) on the x^{-1} form).
        let a_eff = 10.0f64.sqrt();
        let x = 8.0;
        let form = a_eff / x * (-(4.0 / 3.0) * x.powf(1.5)).exp();
        let ratio = p2.h1_tilde[i8] / form;
        assert!((ratio - 1.0).abs() <= 0.02, "ratio {ratio}");
    }

    #[test]
    fn h1_plugback_residual() {
        let p2 = solve_default();
        let h = p2.spacing();
        let d1 = derivative_table(&p2.h1_tilde, h);
        let d2 = derivative_table(&d1, h);
        let mut worst = 0.0f64;
        for (i, &x) in p2.grid.iter().enumerate() {
            if !(-2.0..=6.0).contains(&x) {
                continue;
            }
            let (alpha, beta, gamma) = h1_coefficients(x, p2.q[i], p2.q_prime[i]);
            let terms = [alpha * d2[i], beta * d1[i], gamma * p2.h1_tilde[i]];
            let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
            let res = (terms[0] + terms[1] + terms[2]).abs() / scale;
            worst = worst.max(res);
        }
        assert!(worst <= 1e-6, "residual {worst:e}");
    }

    #[test]
    fn config_validation() {
        let mut c = P2Config::default();
        c.x_min = -9.0;
        assert!(solve_p2_hastings_mcleod(&c).is_err());
        let mut c = P2Config::default();
        c.x_max = 11.0;
        assert!(solve_p2_hastings_mcleod(&c).is_err());
        let mut c = P2Config::default();
        c.step = 1.0;
        assert!(solve_p2_hastings_mcleod(&c).is_err());
        let p2 = solve_default();
        assert!(solve_h1_correction(&p2, &H1Config { amplitude: 0.0 }).is_err());
    }
}
