//! Scaling-limit bookkeeping around the smallest eigenvalue.
//!
//! Three coordinate frames meet here. On the global scale the spectrum
//! follows the Marchenko-Pastur law ([`mp_density`]). When the
//! rectangularity grows with the matrix size, `a = ratio * N`, the smallest
//! eigenvalue sits at a soft spectral edge: [`soft_edge_params`] collects
//! the edge positions and the scale constant, [`soft_edge_coordinate`] maps
//! eigenvalue locations to the Tracy-Widom variable, and [`soft_edge_cdf`]
//! assembles the limiting law together with an optional next-order
//! correction of open amplitude. At fixed `a` the edge is hard instead, and
//! the finite-`N` recurrence data expand in powers of `1/N` with
//! coefficients built from the hard-edge transcendent
//! ([`hard_edge_expansion`]). [`classify_regime`] dispatches between the
//! two expansions and refuses the crossover window where neither applies.

use std::f64::consts::PI;

use thiserror::Error;

use crate::painleve::{PIIISolution, PIISolution, PainleveError};

/// Hard-edge expansion holds for a below this multiple of N^{1/3}.
pub const HARD_EDGE_FACTOR: f64 = 0.5;
/// Soft-edge scaling holds for a above this multiple of N^{1/3}.
pub const SOFT_EDGE_FACTOR: f64 = 2.0;

#[derive(Debug, Error)]
pub enum LimitsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error(
        "crossover regime: a = {a} lies between the hard-edge bound {lower:.4} \
         and the soft-edge bound {upper:.4} at N = {n}; neither expansion applies"
    )]
    Crossover { a: f64, n: u32, lower: f64, upper: f64 },
    #[error(transparent)]
    Painleve(#[from] PainleveError),
}

/// Constants of the soft-edge scaling at rectangularity ratio = a/N.
///
/// In units where the eigenvalue density has mean spacing ~ 1/N near the
/// bulk, the spectrum ends at N x_minus and N x_plus with
///
///   x_-+ = (sqrt(1 + ratio) -+ 1)^2,
///
/// and the smallest-eigenvalue fluctuations live on the scale N^{1/3}/m,
///
///   m = (1 + ratio)^{1/6} / (sqrt(1 + ratio) - 1)^{4/3}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoftEdgeParams {
    /// Rectangularity ratio a/N; positive.
    pub ratio: f64,
    /// Lower spectral edge per eigenvalue scale.
    pub x_minus: f64,
    /// Upper spectral edge per eigenvalue scale.
    pub x_plus: f64,
    /// Fluctuation scale constant.
    pub m: f64,
}

impl SoftEdgeParams {
    /// Aspect ratio c = N/M = 1/(1 + ratio), in (0, 1).
    pub fn c(&self) -> f64 {
        1.0 / (1.0 + self.ratio)
    }
}

/// Soft-edge constants for a given rectangularity ratio a/N > 0.
///
/// The ratio must be strictly positive: as it tends to zero the lower edge
/// collapses onto the origin and `m` diverges, which is exactly the
/// hard-edge regime served by the Painleve III path instead.
pub fn soft_edge_params(ratio: f64) -> Result<SoftEdgeParams, LimitsError> {
    if !(ratio > 0.0) || !ratio.is_finite() {
        return Err(LimitsError::Domain(format!(
            "ratio must be a finite real > 0, got {ratio} (the hard-edge path covers ratio -> 0)"
        )));
    }
    let root = (1.0 + ratio).sqrt();
    Ok(SoftEdgeParams {
        ratio,
        x_minus: (root - 1.0) * (root - 1.0),
        x_plus: (root + 1.0) * (root + 1.0),
        m: (1.0 + ratio).powf(1.0 / 6.0) / (root - 1.0).powf(4.0 / 3.0),
    })
}

/// Marchenko-Pastur density at x for aspect ratio c = N/M in (0, 1]:
///
///   rho(x) = sqrt((x - x_-)(x_+ - x)) / (2 pi x)  on [x_-, x_+],
///
/// with x_-+ = (c^{-1/2} -+ 1)^2, and zero outside. At c = 1 this is the
/// quarter-circle form sqrt((4 - x)/x) / (2 pi) on [0, 4]. The density
/// integrates to one for every admissible c.
pub fn mp_density(x: f64, c: f64) -> Result<f64, LimitsError> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(LimitsError::Domain(format!("aspect ratio c must lie in (0, 1], got {c}")));
    }
    if !x.is_finite() {
        return Err(LimitsError::Domain(format!("x must be finite, got {x}")));
    }
    let s = 1.0 / c.sqrt();
    let x_minus = (s - 1.0) * (s - 1.0);
    let x_plus = (s + 1.0) * (s + 1.0);
    if x <= x_minus || x >= x_plus {
        return Ok(0.0);
    }
    Ok(((x - x_minus) * (x_plus - x)).sqrt() / (2.0 * PI * x))
}

/// Tracy-Widom variable for the smallest eigenvalue at position t:
///
///   x = m (N x_- - t) / N^{1/3}.
///
/// Larger x means t further below the edge, hence larger survival
/// probability. [`soft_edge_time`] is the exact affine inverse.
pub fn soft_edge_coordinate(n: u32, params: &SoftEdgeParams, t: f64) -> Result<f64, LimitsError> {
    if n < 1 {
        return Err(LimitsError::Domain("N must be >= 1".into()));
    }
    if !t.is_finite() {
        return Err(LimitsError::Domain(format!("t must be finite, got {t}")));
    }
    let nf = n as f64;
    Ok(params.m * (nf * params.x_minus - t) / nf.cbrt())
}

/// Eigenvalue position for a Tracy-Widom variable x:
///
///   t = N x_- - x N^{1/3} / m.
pub fn soft_edge_time(n: u32, params: &SoftEdgeParams, x: f64) -> Result<f64, LimitsError> {
    if n < 1 {
        return Err(LimitsError::Domain("N must be >= 1".into()));
    }
    if !x.is_finite() {
        return Err(LimitsError::Domain(format!("x must be finite, got {x}")));
    }
    let nf = n as f64;
    Ok(nf * params.x_minus - x * nf.cbrt() / params.m)
}

/// Soft-edge survival probability at one point.
#[derive(Debug, Clone, Copy)]
pub struct SoftEdgeCdf {
    /// Tracy-Widom variable the eigenvalue position maps to.
    pub x: f64,
    /// Limiting value F2(x).
    pub leading: f64,
    /// Corrected value when an amplitude was supplied.
    pub corrected: Option<f64>,
}

/// Soft-edge CDF Prob(lambda_min >= t) for an N x M matrix with
/// M = N (1 + ratio).
///
/// The leading value is the Tracy-Widom law F2(x) at the scaled coordinate.
/// With an amplitude A the corrected value is
///
///   exp( -integral_x^inf h0 - A N^{-1/3} integral_x^inf h1 ),
///
/// which at A = 0 reduces bitwise to the leading value. The true amplitude
/// of the next-order term is an open constant: the corrected value is a
/// parametrized hypothesis for comparison against sampled data, not a
/// claim. Errors if the scaled coordinate leaves the solved grid.
pub fn soft_edge_cdf(
    n: u32,
    params: &SoftEdgeParams,
    t: f64,
    p2: &PIISolution,
    amplitude: Option<f64>,
) -> Result<SoftEdgeCdf, LimitsError> {
    let x = soft_edge_coordinate(n, params, t)?;
    let cum = p2.cum_h0_at(x)?;
    let leading = (-cum).exp().min(1.0);
    let corrected = match amplitude {
        None => None,
        Some(amp) => {
            if !amp.is_finite() {
                return Err(LimitsError::Domain(format!("amplitude must be finite, got {amp}")));
            }
            let shift = amp * p2.h1_integral_from(x)? / (n as f64).cbrt();
            Some((-(cum + shift)).exp().min(1.0))
        }
    };
    Ok(SoftEdgeCdf { x, leading, corrected })
}

/// Hard-edge 1/N expansion of the recurrence data at one point.
#[derive(Debug, Clone, Copy)]
pub struct HardEdgeExpansion {
    /// Order-one term of R_N - N(N+a): x f' - f.
    pub r0: f64,
    /// Order-1/N term of S_N - (2N + a + 1): -x f'.
    pub s1: f64,
    /// Order-1/N term of R_N - N(N+a): (a/2) x^2 f''.
    pub r1: f64,
    /// Order-1/N^2 term of S_N: -((a+1)/2) x^2 f''.
    pub s2: f64,
    /// N(N+a) + r0 + r1/N.
    pub r_n_approx: f64,
    /// 2N + a + 1 + s1/N + s2/N^2.
    pub s_n_approx: f64,
    /// -N(N+a) + f + (a/2N) x f'.
    pub zeta_n_approx: f64,
}

/// Expansion of R_N, S_N and zeta_N at fixed a in the double-scaling
/// variable x = N t, with coefficients built from the hard-edge
/// transcendent f:
///
///   R_N    ~ N(N+a) + (x f' - f) + (a/2) x^2 f'' / N,
///   S_N    ~ 2N + a + 1 - x f'/N - ((a+1)/2) x^2 f'' / N^2,
///   zeta_N ~ -N(N+a) + f + (a/2N) x f'.
///
/// At a = 0 the transcendent is f = -x and the expansion collapses to the
/// exact closed forms R_k = k^2, S_k = 2k + 1 + t. The supplied `a` must
/// match the exponent the transcendent was solved for.
pub fn hard_edge_expansion(
    p3: &PIIISolution,
    a: f64,
    n: u32,
    x: f64,
) -> Result<HardEdgeExpansion, LimitsError> {
    if n < 1 {
        return Err(LimitsError::Domain("N must be >= 1".into()));
    }
    if a != p3.a {
        return Err(LimitsError::Domain(format!(
            "a = {a} does not match the solved transcendent (a = {})",
            p3.a
        )));
    }
    let nf = n as f64;
    if x == 0.0 {
        // All coefficients vanish at the origin; the series forms would
        // produce 0 * inf for a < 1 where f'' diverges.
        return Ok(HardEdgeExpansion {
            r0: 0.0,
            s1: 0.0,
            r1: 0.0,
            s2: 0.0,
            r_n_approx: nf * (nf + a),
            s_n_approx: 2.0 * nf + a + 1.0,
            zeta_n_approx: -nf * (nf + a),
        });
    }
    let f = p3.f_at(x)?;
    let fp = p3.f_prime_at(x)?;
    let fpp = p3.f_doubleprime_at(x)?;
    let r0 = x * fp - f;
    let s1 = -x * fp;
    let r1 = 0.5 * a * x * x * fpp;
    let s2 = -0.5 * (a + 1.0) * x * x * fpp;
    Ok(HardEdgeExpansion {
        r0,
        s1,
        r1,
        s2,
        r_n_approx: nf * (nf + a) + r0 + r1 / nf,
        s_n_approx: 2.0 * nf + a + 1.0 + s1 / nf + s2 / (nf * nf),
        zeta_n_approx: -nf * (nf + a) + f + 0.5 * a * x * fp / nf,
    })
}

/// Which scaling limit governs the smallest eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalingRegime {
    /// a fixed (or small against N^{1/3}): Bessel/Painleve III territory.
    HardEdge,
    /// a growing like ratio * N: Tracy-Widom territory.
    SoftEdge,
}

/// Dispatch between the hard-edge and soft-edge expansions.
///
/// The boundary scale is a ~ N^{1/3}: below [`HARD_EDGE_FACTOR`] times it
/// the fixed-a expansion is trusted, above [`SOFT_EDGE_FACTOR`] times it
/// the soft-edge scaling is, and the window between them is refused because
/// neither expansion is controlled there.
pub fn classify_regime(a: f64, n: u32) -> Result<ScalingRegime, LimitsError> {
    if n < 1 {
        return Err(LimitsError::Domain("N must be >= 1".into()));
    }
    if !a.is_finite() || a < 0.0 {
        return Err(LimitsError::Domain(format!("a must be a finite real >= 0, got {a}")));
    }
    let scale = (n as f64).cbrt();
    let lower = HARD_EDGE_FACTOR * scale;
    let upper = SOFT_EDGE_FACTOR * scale;
    if a <= lower {
        Ok(ScalingRegime::HardEdge)
    } else if a >= upper {
        Ok(ScalingRegime::SoftEdge)
    } else {
        Err(LimitsError::Crossover { a, n, lower, upper })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::op_engine::{compute_cdf, ModelParams};
    use crate::painleve::{
        solve_p2_hastings_mcleod, solve_p3, tw2_cdf, ODESolverConfig, P2Config,
    };
    use crate::precision::PrecisionContext;

    #[test]
    fn soft_edge_params_closed_forms() {
        let p = soft_edge_params(3.0).unwrap();
        assert_eq!(p.x_minus, 1.0);
        assert_eq!(p.x_plus, 9.0);
        assert!((p.m - 4.0f64.powf(1.0 / 6.0)).abs() < 1e-15);
        assert!((p.c() - 0.25).abs() < 1e-15);

        let p = soft_edge_params(8.0).unwrap();
        assert_eq!(p.x_minus, 4.0);
        assert_eq!(p.x_plus, 16.0);
        assert!((p.m - 9.0f64.powf(1.0 / 6.0) / 2.0f64.powf(4.0 / 3.0)).abs() < 1e-15);

        assert!(soft_edge_params(0.0).is_err());
        assert!(soft_edge_params(-1.0).is_err());
        assert!(soft_edge_params(f64::NAN).is_err());
    }

    #[test]
    fn mp_density_point_values() {
        assert!((mp_density(2.0, 1.0).unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-15);
        assert_eq!(mp_density(4.0, 1.0).unwrap(), 0.0);
        assert_eq!(mp_density(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(mp_density(-0.5, 1.0).unwrap(), 0.0);
        assert_eq!(mp_density(4.5, 1.0).unwrap(), 0.0);

        // c = 1/4: support [1, 9], interior value by the closed form.
        assert_eq!(mp_density(1.0, 0.25).unwrap(), 0.0);
        assert_eq!(mp_density(9.0, 0.25).unwrap(), 0.0);
        let got = mp_density(4.0, 0.25).unwrap();
        assert!((got - 15.0f64.sqrt() / (8.0 * PI)).abs() < 1e-15);

        assert!(mp_density(1.0, 0.0).is_err());
        assert!(mp_density(1.0, 1.2).is_err());
        assert!(mp_density(1.0, -0.3).is_err());
        assert!(mp_density(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn mp_density_normalizes_to_one() {
        // Substituting x = x_- + (x_+ - x_-) sin^2(phi) removes the
        // square-root endpoints, so the composite midpoint rule converges at
        // second order in a smooth integrand; endpoints are never sampled.
        for &c in &[1.0f64, 0.7, 0.25] {
            let s = 1.0 / c.sqrt();
            let x_minus = (s - 1.0) * (s - 1.0);
            let width = (s + 1.0) * (s + 1.0) - x_minus;
            let n = 200_000;
            let h = PI / 2.0 / n as f64;
            let mut total = 0.0;
            for i in 0..n {
                let phi = (i as f64 + 0.5) * h;
                let (sin, cos) = phi.sin_cos();
                let x = x_minus + width * sin * sin;
                total += mp_density(x, c).unwrap() * width * 2.0 * sin * cos * h;
            }
            assert!((total - 1.0).abs() <= 1e-8, "c = {c}: integral = {total}");
        }
    }

    #[test]
    fn soft_edge_coordinate_is_affine_with_exact_inverse() {
        let params = soft_edge_params(3.0).unwrap();
        let n = 100;

        // Centering: t at the scaled edge maps to x = 0.
        assert_eq!(soft_edge_coordinate(n, &params, 100.0 * params.x_minus).unwrap(), 0.0);

        // Plug-in value for the inverse at x = 1.
        let t1 = soft_edge_time(n, &params, 1.0).unwrap();
        let expected = 100.0 - 100.0f64.cbrt() / 4.0f64.powf(1.0 / 6.0);
        assert!((t1 - expected).abs() <= 1e-12 * expected.abs());

        for &t in &[0.0, 17.3, 99.2, 150.0, -3.0] {
            let x = soft_edge_coordinate(n, &params, t).unwrap();
            let back = soft_edge_time(n, &params, x).unwrap();
            assert!((back - t).abs() <= 1e-12 * t.abs().max(1.0), "t = {t}, back = {back}");
        }

        assert!(soft_edge_coordinate(0, &params, 1.0).is_err());
        assert!(soft_edge_coordinate(n, &params, f64::INFINITY).is_err());
    }

    #[test]
    fn classify_regime_dispatch() {
        let scale = 100.0f64.cbrt();
        assert_eq!(classify_regime(1.0, 100).unwrap(), ScalingRegime::HardEdge);
        assert_eq!(classify_regime(0.5 * scale, 100).unwrap(), ScalingRegime::HardEdge);
        assert_eq!(classify_regime(20.0, 100).unwrap(), ScalingRegime::SoftEdge);
        assert_eq!(classify_regime(2.0 * scale, 100).unwrap(), ScalingRegime::SoftEdge);

        match classify_regime(5.0, 100) {
            Err(LimitsError::Crossover { lower, upper, .. }) => {
                assert!(lower < 5.0 && 5.0 < upper);
            }
            other => panic!("expected crossover refusal, got {other:?}"),
        }
        assert!(classify_regime(-1.0, 100).is_err());
        assert!(classify_regime(1.0, 0).is_err());
    }

    #[test]
    fn soft_edge_cdf_leading_and_corrected() {
        let p2 = solve_p2_hastings_mcleod(&P2Config::default()).unwrap();
        let params = soft_edge_params(3.0).unwrap();
        let n = 200;

        let mut prev = 0.0;
        for &x in &[-2.0, -0.5, 0.0, 1.0, 3.0] {
            let t = soft_edge_time(n, &params, x).unwrap();
            let out = soft_edge_cdf(n, &params, t, &p2, None).unwrap();
            assert!(out.corrected.is_none());
            assert!((out.x - x).abs() <= 1e-12 * x.abs().max(1.0));

            // Leading value is the Tracy-Widom law, computed identically.
            assert_eq!(out.leading, tw2_cdf(&p2, out.x).unwrap());

            // Growing x means t further below the edge: survival grows.
            assert!(out.leading >= prev);
            prev = out.leading;

            // Zero amplitude reduces exactly to the leading value.
            let out0 = soft_edge_cdf(n, &params, t, &p2, Some(0.0)).unwrap();
            assert_eq!(out0.corrected.unwrap(), out0.leading);

            // The correction integral is positive, so the shift direction
            // follows the sign of the amplitude.
            let pos = soft_edge_cdf(n, &params, t, &p2, Some(1.0)).unwrap();
            let neg = soft_edge_cdf(n, &params, t, &p2, Some(-1.0)).unwrap();
            assert!(pos.corrected.unwrap() <= out.leading);
            assert!(neg.corrected.unwrap() >= out.leading);
        }

        // Deep below the edge the law saturates at one.
        let t = soft_edge_time(n, &params, 3.0).unwrap();
        let out = soft_edge_cdf(n, &params, t, &p2, None).unwrap();
        assert!(out.leading > 0.999 && out.leading <= 1.0);

        // Coordinates outside the solved grid are refused.
        let t = soft_edge_time(n, &params, -9.0).unwrap();
        assert!(soft_edge_cdf(n, &params, t, &p2, None).is_err());
        let t = soft_edge_time(n, &params, 10.5).unwrap();
        assert!(soft_edge_cdf(n, &params, t, &p2, None).is_err());
    }

    #[test]
    fn hard_edge_expansion_collapses_at_a_zero() {
        let p3 = solve_p3(0.0, 4.0, &ODESolverConfig::default()).unwrap();
        let x = 1.5;
        let n = 50;
        let e = hard_edge_expansion(&p3, 0.0, n, x).unwrap();
        assert!(e.r0.abs() <= 1e-9, "r0 = {}", e.r0);
        assert!((e.s1 - x).abs() <= 1e-9, "s1 = {}", e.s1);
        assert!(e.r1.abs() <= 1e-9);
        assert!(e.s2.abs() <= 1e-9);

        // Exact closed forms R_k = k^2, S_k = 2k + 1 + t at t = x/N.
        let nf = n as f64;
        assert!((e.r_n_approx - nf * nf).abs() <= 1e-9 * nf * nf);
        assert!((e.s_n_approx - (2.0 * nf + 1.0 + x / nf)).abs() <= 1e-9 * nf);
        assert!((e.zeta_n_approx - (-nf * nf - x)).abs() <= 1e-9 * nf * nf);
    }

    #[test]
    fn hard_edge_expansion_small_x_coefficients() {
        // Near the origin f'' -> -1 at a = 1, so r1 -> -x^2/2 and
        // s2 -> +x^2.
        let p3 = solve_p3(1.0, 4.0, &ODESolverConfig::default()).unwrap();
        let x = 0.01;
        let e = hard_edge_expansion(&p3, 1.0, 100, x).unwrap();
        assert!((e.r1 + x * x / 2.0).abs() <= 0.03 * x * x / 2.0, "r1 = {}", e.r1);
        assert!((e.s2 - x * x).abs() <= 0.03 * x * x, "s2 = {}", e.s2);
    }

    #[test]
    fn hard_edge_expansion_vanishes_at_origin() {
        let p3 = solve_p3(0.5, 4.0, &ODESolverConfig::default()).unwrap();
        let e = hard_edge_expansion(&p3, 0.5, 10, 0.0).unwrap();
        assert_eq!(e.r0, 0.0);
        assert_eq!(e.s1, 0.0);
        assert_eq!(e.r1, 0.0);
        assert_eq!(e.s2, 0.0);
        assert_eq!(e.r_n_approx, 105.0);
        assert_eq!(e.s_n_approx, 21.5);
        assert_eq!(e.zeta_n_approx, -105.0);
    }

    #[test]
    fn hard_edge_expansion_validates_inputs() {
        let p3 = solve_p3(1.0, 4.0, &ODESolverConfig::default()).unwrap();
        assert!(hard_edge_expansion(&p3, 1.0, 0, 1.0).is_err());
        assert!(hard_edge_expansion(&p3, 2.0, 10, 1.0).is_err());
        assert!(hard_edge_expansion(&p3, 1.0, 10, 20.0).is_err());
        assert!(hard_edge_expansion(&p3, 1.0, 10, -1.0).is_err());
    }

    #[test]
    fn trace_matches_expansion_at_one_over_n() {
        // The recurrence trace at t = x/N against the expansion: the
        // residual after subtracting r0 halves when N doubles, the full
        // approximation beats the r0-only form, and at N = 200 the zeta
        // drift slope matches (a/2) x f'.
        let ctx = PrecisionContext::extended();
        for &a in &[1.0, 2.0] {
            let p3 = solve_p3(a, 4.0, &ODESolverConfig::default()).unwrap();
            for &x in &[0.5, 1.75, 3.0] {
                let mut residuals = Vec::new();
                for &n in &[50u32, 100, 200] {
                    let nf = n as f64;
                    let params = ModelParams::new(n, a, x / nf).unwrap();
                    let trace = compute_cdf(&params, &ctx).unwrap().trace.unwrap();
                    let st = &trace.states[n as usize];
                    let e = hard_edge_expansion(&p3, a, n, x).unwrap();

                    let rho = st.r - nf * (nf + a) - e.r0;
                    assert!(
                        (st.r - e.r_n_approx).abs() <= 0.6 * rho.abs() + 1e-6,
                        "a = {a}, x = {x}, N = {n}: trace - approx = {}, rho = {rho}",
                        st.r - e.r_n_approx
                    );
                    residuals.push(rho);

                    if n == 200 {
                        let f = p3.f_at(x).unwrap();
                        let slope = nf * (st.zeta + nf * (nf + a) - f);
                        let target = 0.5 * a * x * p3.f_prime_at(x).unwrap();
                        assert!(
                            (slope - target).abs() <= 0.10 * target.abs(),
                            "a = {a}, x = {x}: slope = {slope}, target = {target}"
                        );
                    }
                }
                for w in residuals.windows(2) {
                    let ratio = w[0] / w[1];
                    assert!(
                        (1.7..=2.3).contains(&ratio),
                        "a = {a}, x = {x}: residual ratio {ratio} outside [1.7, 2.3]"
                    );
                }
            }
        }
    }
}
