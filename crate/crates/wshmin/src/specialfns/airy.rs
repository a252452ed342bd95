//! Airy function Ai and its derivative on [-10, 20].
//!
//! For x <= 8 the Maclaurin series is summed in double-double arithmetic:
//! the two series halves cancel to ~e^{2 zeta} (zeta = (2/3)x^{3/2}) for
//! positive x and oscillate for negative x, costing up to ~14 digits at the
//! switchover, which the 31-digit backend absorbs. For x > 8 the standard
//! asymptotic expansion in 1/zeta is summed to its smallest term (relative
//! error ~e^{-2 zeta} <= 7e-14 at x = 8, shrinking rapidly). Outside
//! [-10, 20] the evaluation errors out rather than extrapolate.

use super::SpecialFnError;
use crate::dd::DoubleDouble;
use crate::precision::PrecisionContext;
use crate::specialfns::gamma::lgamma_r;
use std::sync::OnceLock;

type Dd = DoubleDouble;

const X_MIN: f64 = -10.0;
const X_MAX: f64 = 20.0;
const SWITCHOVER: f64 = 8.0;
const MAX_TERMS: usize = 400;

/// Ai(0) = 3^{-2/3} / Gamma(2/3) and -Ai'(0) = 3^{-1/3} / Gamma(1/3).
fn series_constants() -> &'static (Dd, Dd) {
    static CONSTS: OnceLock<(Dd, Dd)> = OnceLock::new();
    CONSTS.get_or_init(|| {
        let three = Dd::from_f64(3.0);
        let ln3 = three.ln();
        let third = Dd::ONE / three;
        let c1 = (-(ln3 * Dd::from_f64(2.0) * third) - lgamma_r(third * 2.0).unwrap()).exp();
        let c2 = (-(ln3 * third) - lgamma_r(third).unwrap()).exp();
        (c1, c2)
    })
}

fn inv_two_sqrt_pi() -> &'static Dd {
    static V: OnceLock<Dd> = OnceLock::new();
    V.get_or_init(|| Dd::ONE / (Dd::PI.sqrt() * 2.0))
}

/// Maclaurin evaluation of (Ai, Ai') in double-double.
fn maclaurin(x: Dd) -> (Dd, Dd) {
    let (c1, c2) = *series_constants();
    let x3 = x * x * x;
    let eps = Dd::from_f64(Dd::EPSILON);

    // f = Sum a_k x^{3k}, a_{k+1}/a_k = 1/((3k+2)(3k+3)); g likewise with
    // 1/((3k+3)(3k+4)); derivative series u, v as term-wise derivatives.
    let mut f_term = Dd::ONE;
    let mut f_sum = f_term;
    let mut g_term = x;
    let mut g_sum = g_term;
    // u_1 = x^2/2, ratio x^3/((3k)(3k+2)); v_0 = 1, ratio x^3/((3k+1)(3k+3)).
    let mut u_term = x * x * Dd::from_f64(0.5);
    let mut u_sum = u_term;
    let mut v_term = Dd::ONE;
    let mut v_sum = v_term;

    for k in 0..MAX_TERMS {
        let kf = 3.0 * k as f64;
        f_term = f_term * x3 / Dd::from_f64((kf + 2.0) * (kf + 3.0));
        g_term = g_term * x3 / Dd::from_f64((kf + 3.0) * (kf + 4.0));
        u_term = u_term * x3 / Dd::from_f64((kf + 3.0) * (kf + 5.0));
        v_term = v_term * x3 / Dd::from_f64((kf + 1.0) * (kf + 3.0));
        f_sum += f_term;
        g_sum += g_term;
        u_sum += u_term;
        v_sum += v_term;
        if f_term.abs() < eps && g_term.abs() < eps && u_term.abs() < eps && v_term.abs() < eps {
            break;
        }
    }
    (c1 * f_sum - c2 * g_sum, c1 * u_sum - c2 * v_sum)
}

/// Asymptotic evaluation of (Ai, Ai') for large positive x, truncated at
/// the smallest term.
fn asymptotic(x: Dd) -> (Dd, Dd) {
    let zeta = x.sqrt() * x * Dd::from_f64(2.0 / 3.0);
    let inv_zeta = Dd::ONE / zeta;

    // u_0 = 1, u_{k+1}/u_k = (3k+1/2)(3k+3/2)(3k+5/2) / (54 (k+1)(k+1/2));
    // v_k = (6k+1)/(1-6k) u_k. Terms alternate through (-1)^k.
    let mut u = Dd::ONE;
    let mut pow = Dd::ONE;
    let mut ai_sum = Dd::ONE;
    let mut aip_sum = Dd::ONE;
    let mut prev = f64::INFINITY;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        u = u * Dd::from_f64(kf * 3.0 + 0.5)
            * Dd::from_f64(kf * 3.0 + 1.5)
            * Dd::from_f64(kf * 3.0 + 2.5)
            / Dd::from_f64(54.0 * (kf + 1.0) * (kf + 0.5));
        pow = pow * inv_zeta;
        let term = u * pow;
        // Divergent series: stop at the smallest term.
        if term.hi.abs() >= prev {
            break;
        }
        prev = term.hi.abs();
        let v = u * Dd::from_f64((6.0 * (kf + 1.0) + 1.0) / (1.0 - 6.0 * (kf + 1.0)));
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        ai_sum = ai_sum + term * sign;
        aip_sum = aip_sum + v * pow * sign;
        if term.hi.abs() < Dd::EPSILON {
            break;
        }
    }

    let root4 = x.sqrt().sqrt();
    let envelope = (-zeta).exp() * *inv_two_sqrt_pi();
    let ai = envelope / root4 * ai_sum;
    let aip = -(envelope * root4) * aip_sum;
    (ai, aip)
}

fn airy_pair(x: f64) -> Result<(Dd, Dd), SpecialFnError> {
    if !(X_MIN..=X_MAX).contains(&x) {
        return Err(SpecialFnError::Domain(format!(
            "airy_ai supports x in [{X_MIN}, {X_MAX}], got {x}"
        )));
    }
    let xd = Dd::from_f64(x);
    if x <= SWITCHOVER {
        Ok(maclaurin(xd))
    } else {
        Ok(asymptotic(xd))
    }
}

/// Ai(x) on [-10, 20], absolute accuracy well below 1e-10 in either mode.
pub fn airy_ai(x: f64, _ctx: &PrecisionContext) -> Result<f64, SpecialFnError> {
    airy_pair(x).map(|(ai, _)| ai.to_f64())
}

/// Double-double Ai(x); feeds boundary conditions of the Painleve II solve.
pub(crate) fn airy_ai_dd(x: f64) -> Result<Dd, SpecialFnError> {
    airy_pair(x).map(|(ai, _)| ai)
}

/// Double-double Ai'(x); same range and caveats as [`airy_ai_dd`].
pub(crate) fn airy_ai_prime_dd(x: f64) -> Result<Dd, SpecialFnError> {
    airy_pair(x).map(|(_, aip)| aip)
}
