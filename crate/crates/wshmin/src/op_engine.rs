//! Orthogonal-polynomial coefficient recursion for the smallest-eigenvalue
//! law of the complex Wishart ensemble.
//!
//! The gap probability F_N(t) = Prob(lambda_min >= t) is a product of squared
//! norms h_k(t) of the polynomials orthogonal w.r.t. x^a e^{-x} on [t, inf).
//! The norms obey a first-order (in k) recursion once the running sums of the
//! recurrence coefficients S_k, S_k^2, R_k are carried along, so the whole
//! trace at fixed (a, t) costs O(N) special-function-free steps after the
//! single incomplete-gamma evaluation that seeds it.
//!
//! Everything runs generically in [`Real`]: standard precision is plain f64,
//! extended is double-double. A run that loses the orthogonality identity
//! omega_k^2 = R_k theta_k theta_{k-1} beyond 1e-7, or drives R_{k+1} to the
//! configured floor, is retried in extended precision before reporting
//! failure.

use crate::dd::DoubleDouble;
use crate::precision::{PrecisionContext, PrecisionMode};
use crate::real::Real;
use crate::specialfns::{self, SpecialFnError};
use thiserror::Error;

/// Relative residual of the inline identity check past which a run is
/// abandoned as precision-exhausted.
const INLINE_RESIDUAL_LIMIT: f64 = 1e-7;

/// Relative step used by every finite-difference derivative in this module.
const FD_RELATIVE_STEP: f64 = 1e-3;

/// ln of the smallest positive (subnormal) f64; below this log_F the
/// probability itself is reported as an underflowed zero.
const LN_TINY: f64 = -744.4400719213812;

/// Forward error the recursion must deliver; runs whose estimated error
/// exceeds this are refused rather than returned.
const DELIVERABLE_ERROR: f64 = 1e-10;

/// Error budget for results served directly from the f64 backend; keeps two
/// digits of margin under [`DELIVERABLE_ERROR`] because the predictor behind
/// it is a fit, not a bound.
const F64_SERVE_LIMIT: f64 = 1e-12;

/// The recursion amplifies roundoff roughly like exp(rate * k). Empirical
/// blowup rates (the k at which a seed error of one ulp reaches O(1)) are
/// about 0.06 at t = 0.05, 0.09 at t = 0.2, 0.37 at t = 0.9 and 0.73 at
/// t = 2; this envelope stays above all of them. Callers bound the error of
/// log F by eps N exp(rate N): the extra N covers the coherent accumulation
/// of per-step drift in the log sum (measured 6.8e-10 at N = 120, t = 0.05
/// against a bare-exponential prediction of 7.2e-10, so the envelope alone
/// has no margin).
fn error_growth_rate(t: f64) -> f64 {
    0.1 + 0.5 * t
}

/// Per-step trajectory divergence past which the f64 shadow run has left
/// the linear regime and stops being a usable error probe for the
/// double-double run.
const SHADOW_LINEAR_LIMIT: f64 = 1e-2;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate recursion: R_{{{k}}} = {value:e} at or below floor {floor:e}")]
    DegenerateRecursion { k: u32, value: f64, floor: f64 },
    #[error("orthogonality identity residual {residual:e} at k = {k} exceeds {INLINE_RESIDUAL_LIMIT:e}")]
    IdentityResidual { k: u32, residual: f64 },
    #[error("estimated recursion error {estimate:e} exceeds {DELIVERABLE_ERROR:e} even in extended precision")]
    PrecisionExhausted { estimate: f64 },
    #[error("determinant certifies only {certified_digits:.1} digits (need 8)")]
    Conditioning { certified_digits: f64 },
    #[error("N = {n} exceeds the size limit {max} for this precision mode")]
    SizeLimit { n: u32, max: u32 },
    #[error(transparent)]
    SpecialFn(#[from] SpecialFnError),
}

/// Ensemble and evaluation-point parameters.
///
/// `a = M - N` is the Laguerre exponent; it is a plain real >= 0 and nothing
/// here ever assumes it is an integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub n: u32,
    pub a: f64,
    pub t: f64,
}

impl ModelParams {
    pub fn new(n: u32, a: f64, t: f64) -> Result<Self, EngineError> {
        let p = ModelParams { n, a, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.n < 1 {
            return Err(EngineError::Domain("N must be >= 1".into()));
        }
        if !(self.a >= 0.0) || !self.a.is_finite() {
            return Err(EngineError::Domain(format!(
                "a must be a finite real >= 0, got {}",
                self.a
            )));
        }
        if !(self.t >= 0.0) || !self.t.is_finite() {
            return Err(EngineError::Domain(format!(
                "t must be a finite real >= 0, got {}",
                self.t
            )));
        }
        Ok(())
    }
}

/// One node of the coefficient recursion.
///
/// `log_h` is ln h_k; `r`, `s`, `zeta` are R_k, S_k, zeta_k. The running sums
/// cover indices strictly below k, so `zeta == -sum_s` holds exactly at every
/// step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OPState {
    pub k: u32,
    pub log_h: f64,
    pub r: f64,
    pub s: f64,
    pub zeta: f64,
    pub sum_s: f64,
    pub sum_s2: f64,
    pub sum_r: f64,
}

/// Full coefficient trace k = 0..=N at fixed (a, t).
///
/// theta_k and omega_k are derived quantities; they are recomputed from the
/// stored states on demand so they can never drift from them.
#[derive(Debug, Clone)]
pub struct RecurrenceTrace {
    pub params: ModelParams,
    pub states: Vec<OPState>,
}

impl RecurrenceTrace {
    /// theta_k = 2k + 1 + a - S_k.
    pub fn theta(&self, k: usize) -> f64 {
        let st = &self.states[k];
        2.0 * st.k as f64 + 1.0 + self.params.a - st.s
    }

    /// omega_k = -R_k - zeta_k.
    pub fn omega(&self, k: usize) -> f64 {
        let st = &self.states[k];
        -st.r - st.zeta
    }
}

/// Evaluated distribution point.
#[derive(Debug, Clone)]
pub struct DistributionResult {
    /// F_N(t), clamped to 0 on underflow.
    pub f: f64,
    /// ln F_N(t); finite even when `f` underflows.
    pub log_f: f64,
    /// H_N(t) = t d/dt ln F_N(t), from the trace (no differencing).
    pub h: Option<f64>,
    /// True when log_f is below the representable range of positive f64.
    pub underflow: bool,
    pub trace: Option<RecurrenceTrace>,
}

/// Maximum relative residuals of the algebraic and differential identities
/// satisfied by a valid trace. Purely diagnostic.
#[derive(Debug, Clone, Copy)]
pub struct IdentityReport {
    /// omega_k^2 = R_k theta_k theta_{k-1}, k = 1..=N.
    pub omega_sq: f64,
    /// omega_k^2 - theta_k(theta_k - a - 2k + t) omega_k
    ///   - theta_k(kt(k+a) + (theta_k + t) zeta_k) = 0, k = 0..=N.
    pub quadratic: f64,
    /// S_k - R_{k+1} + R_k = t dS_k/dt, k = 0..N.
    pub schlesinger_s: f64,
    /// 2 - S_{k+1} + S_k = t d ln R_{k+1}/dt, k = 0..N.
    pub schlesinger_r: f64,
    /// sigma-form residual of H_N with finite-difference derivatives.
    pub painleve_v: f64,
}

struct KernelState<R: Real> {
    k: u32,
    log_h: R,
    r: R,
    s: R,
    zeta: R,
    sum_s: R,
    sum_s2: R,
    sum_r: R,
}

impl<R: Real> KernelState<R> {
    fn snapshot(&self) -> OPState {
        OPState {
            k: self.k,
            log_h: self.log_h.to_f64(),
            r: self.r.to_f64(),
            s: self.s.to_f64(),
            zeta: self.zeta.to_f64(),
            sum_s: self.sum_s.to_f64(),
            sum_s2: self.sum_s2.to_f64(),
            sum_r: self.sum_r.to_f64(),
        }
    }

    fn lift(st: &OPState) -> Self {
        KernelState {
            k: st.k,
            log_h: R::from_f64(st.log_h),
            r: R::from_f64(st.r),
            s: R::from_f64(st.s),
            zeta: R::from_f64(st.zeta),
            sum_s: R::from_f64(st.sum_s),
            sum_s2: R::from_f64(st.sum_s2),
            sum_r: R::from_f64(st.sum_r),
        }
    }
}

/// Seed state. h_0 is the upper incomplete gamma Gamma(1+a, t); S_0 adds the
/// boundary term e^{-t} t^{a+1} / Gamma(1+a, t) to a + 1.
fn init_kernel<R: Real>(a: f64, t: f64) -> Result<KernelState<R>, EngineError> {
    let ar = R::from_f64(a);
    let tr = R::from_f64(t);
    let one = R::one();
    let log_h = specialfns::ln_upper_gamma_r(ar + one, tr)?;
    let s = if t == 0.0 {
        ar + one
    } else {
        // exp(-t + (a+1) ln t - ln h_0) stays bounded: the exponent is the
        // log of a ratio <= a + 1.
        ((ar + one) * tr.ln() - tr - log_h).exp() + ar + one
    };
    Ok(KernelState {
        k: 0,
        log_h,
        r: R::zero(),
        s,
        zeta: R::zero(),
        sum_s: R::zero(),
        sum_s2: R::zero(),
        sum_r: R::zero(),
    })
}

/// One step k -> k+1 of the summed recursion.
///
/// R_{k+1} = 2 sum_S - R_k - S_k(S_k - a - t - 2k - 2) - t(2k + 1 + a)
/// (S_{k+1} + S_k - 3 - a - t - 2k) R_{k+1}
///     = 2 (sum_R + R_k) + (sum_S2 + S_k^2) - t (sum_S + S_k)
fn advance_kernel<R: Real>(
    st: &KernelState<R>,
    a: f64,
    t: f64,
    floor: f64,
) -> Result<KernelState<R>, EngineError> {
    let ar = R::from_f64(a);
    let tr = R::from_f64(t);
    let two_k = R::from_f64(2.0 * st.k as f64);
    let one = R::one();
    let two = R::from_f64(2.0);
    let three = R::from_f64(3.0);

    let r_next = two * st.sum_s
        - st.r
        - st.s * (st.s - ar - tr - two_k - two)
        - tr * (two_k + one + ar);
    if !(r_next.to_f64() > floor) {
        return Err(EngineError::DegenerateRecursion {
            k: st.k + 1,
            value: r_next.to_f64(),
            floor,
        });
    }

    let rhs = two * (st.sum_r + st.r) + (st.sum_s2 + st.s * st.s) - tr * (st.sum_s + st.s);
    let s_next = rhs / r_next + three + ar + tr + two_k - st.s;

    Ok(KernelState {
        k: st.k + 1,
        log_h: st.log_h + r_next.ln(),
        r: r_next,
        s: s_next,
        zeta: st.zeta - st.s,
        sum_s: st.sum_s + st.s,
        sum_s2: st.sum_s2 + st.s * st.s,
        sum_r: st.sum_r + st.r,
    })
}

struct RunOutput {
    states: Vec<OPState>,
    /// ln F_N(t) accumulated as a sum of well-scaled log ratios.
    log_f: f64,
    zeta_n: f64,
}

/// Forward run to index N with the inline identity guard.
fn run_kernel<R: Real>(
    n: u32,
    a: f64,
    t: f64,
    floor: f64,
    init: KernelState<R>,
) -> Result<RunOutput, EngineError> {
    let ar = R::from_f64(a);
    let one = R::one();

    let mut st = init;
    // delta_k = ln h_k(t) - ln h_k(0); the k = 0 term is
    // ln Gamma(1+a, t) - ln Gamma(1+a), and each step adds
    // ln R_{k+1} - ln((k+1)(k+1+a)), so no large-magnitude cancellation ever
    // enters the sum.
    let mut delta = st.log_h - specialfns::lgamma_r(ar + one)?;
    let mut log_f = R::zero();
    let mut states = Vec::with_capacity(n as usize + 1);
    states.push(st.snapshot());

    for k in 0..n {
        log_f += delta;
        let prev_s = st.s;
        st = advance_kernel(&st, a, t, floor)?;
        let kf = R::from_f64((k + 1) as f64);
        delta += st.r.ln() - (kf * (kf + ar)).ln();

        // Inline guard: omega^2 = R theta theta' must survive roundoff.
        // theta and omega are differences of O(k)-sized quantities, so the
        // identity carries intrinsic noise of that size times epsilon; at
        // small t both sides cancel to far below it and the residual is
        // meaningless, so the guard only fires above the noise floor.
        let theta = R::from_f64(2.0 * (k + 1) as f64 + 1.0) + ar - st.s;
        let theta_prev = R::from_f64(2.0 * k as f64 + 1.0) + ar - prev_s;
        let omega = -st.r - st.zeta;
        let lhs = omega * omega;
        let rhs = st.r * theta * theta_prev;
        let scale = lhs.abs().max_val(rhs.abs()).to_f64().max(f64::MIN_POSITIVE);
        let diff = (lhs - rhs).abs().to_f64();
        let cancel = {
            let r = st.r.to_f64();
            let (th, tp) = (theta.to_f64().abs(), theta_prev.to_f64().abs());
            let b = 2.0 * (k + 1) as f64 + 1.0 + a + st.s.to_f64().abs();
            let bp = 2.0 * k as f64 + 1.0 + a + prev_s.to_f64().abs();
            let w = omega.to_f64().abs();
            r * (th * bp + tp * b) + 2.0 * w * (r + st.zeta.to_f64().abs())
        };
        let noise = R::epsilon() * 100.0 * cancel.max(scale);
        let residual = diff / scale;
        if residual > INLINE_RESIDUAL_LIMIT && diff > noise {
            return Err(EngineError::IdentityResidual {
                k: k + 1,
                residual,
            });
        }
        states.push(st.snapshot());
    }

    Ok(RunOutput {
        states,
        log_f: log_f.to_f64(),
        zeta_n: st.zeta.to_f64(),
    })
}

/// Closed-form t = 0 trace: R_k = k(k+a), S_k = 2k+a+1, zeta_k = -k(k+a),
/// h_k = Gamma(k+a+1) k!.
fn closed_table(n: u32, a: f64) -> Result<Vec<OPState>, EngineError> {
    let mut states = Vec::with_capacity(n as usize + 1);
    let mut sum_s = 0.0f64;
    let mut sum_s2 = 0.0f64;
    let mut sum_r = 0.0f64;
    let mut log_h = specialfns::lgamma_r(1.0 + a)?;
    for k in 0..=n {
        let kf = k as f64;
        let r = kf * (kf + a);
        let s = 2.0 * kf + a + 1.0;
        if k > 0 {
            log_h += r.ln();
        }
        states.push(OPState {
            k,
            log_h,
            r,
            s,
            zeta: -sum_s,
            sum_s,
            sum_s2,
            sum_r,
        });
        sum_s += s;
        sum_s2 += s * s;
        sum_r += r;
    }
    Ok(states)
}

/// f64 run seeded from a double-double initial state rounded to f64; the
/// incomplete-gamma seed would otherwise start the trajectory tens of ulps
/// off before the recursion adds a single step of its own roundoff.
fn run_f64(n: u32, a: f64, t: f64, floor: f64) -> Result<RunOutput, EngineError> {
    let init = KernelState::<f64>::lift(&init_kernel::<DoubleDouble>(a, t)?.snapshot());
    run_kernel(n, a, t, floor, init)
}

fn run_dd(n: u32, a: f64, t: f64, floor: f64) -> Result<RunOutput, EngineError> {
    let init = init_kernel::<DoubleDouble>(a, t)?;
    run_kernel(n, a, t, floor, init)
}

fn rel_diff(x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).abs() / scale
    }
}

struct ShadowAssessment {
    /// Worst observed discrepancy: |d log F| plus the per-index relative
    /// drifts of R, S and zeta.
    divergence: f64,
    /// First index whose trajectory drift exceeds [`SHADOW_LINEAR_LIMIT`],
    /// if any; past it the f64 error no longer scales linearly with its
    /// seed and cannot be transferred to the dd run.
    decohered_at: Option<u32>,
}

fn assess_shadow(f: &RunOutput, d: &RunOutput) -> ShadowAssessment {
    let mut divergence = (f.log_f - d.log_f).abs().max(rel_diff(f.zeta_n, d.zeta_n));
    let mut decohered_at = None;
    for (fs, ds) in f.states.iter().zip(&d.states) {
        let rho = rel_diff(fs.r, ds.r)
            .max(rel_diff(fs.s, ds.s))
            .max(rel_diff(fs.zeta, ds.zeta));
        if rho > SHADOW_LINEAR_LIMIT && decohered_at.is_none() {
            decohered_at = Some(fs.k);
        }
        divergence = divergence.max(rho);
    }
    ShadowAssessment {
        divergence,
        decohered_at,
    }
}

/// Run in the requested mode with an a-posteriori accuracy guarantee.
///
/// The recursion amplifies its seed roundoff exponentially in k, and a
/// drifted trajectory still satisfies the orthogonality identities (the
/// drift shadows a nearby exact solution), so no inline residual can catch
/// it. Instead an f64 run always executes first; standard mode serves it
/// directly only when the growth envelope bounds its error under
/// [`F64_SERVE_LIMIT`]. Every other case runs the double-double backend and
/// estimates its error from the observed f64 divergence scaled by the ulp
/// ratio of the two backends: while both trajectories respond linearly to
/// their seed roundoff the amplification factor is common, so the dd error
/// is the f64 divergence times eps_dd / eps_f64. When the f64 shadow left
/// the linear regime at step k (or died there), that transfer is invalid
/// and the growth rate is read off the crossing instead: one f64 ulp
/// reached the limit in k steps. Estimates above [`DELIVERABLE_ERROR`] are
/// refused.
fn run_validated(n: u32, a: f64, t: f64, ctx: &PrecisionContext) -> Result<RunOutput, EngineError> {
    let floor = ctx.recurrence_floor;
    let nf = n as f64;
    let f64_run = run_f64(n, a, t, floor);
    if matches!(ctx.mode, PrecisionMode::Standard) && f64_run.is_ok() {
        let predicted = f64::EPSILON * nf * (error_growth_rate(t) * nf).exp();
        if predicted <= F64_SERVE_LIMIT {
            return f64_run;
        }
    }

    let dd_run = run_dd(n, a, t, floor)?;
    let eps_ratio = DoubleDouble::EPSILON / f64::EPSILON;
    let safety = 10.0;
    let extrapolate = |k: u32, reached: f64| {
        let rate = (reached / f64::EPSILON).ln() / k.max(1) as f64;
        DoubleDouble::EPSILON * nf * (rate * nf).exp() * safety
    };
    let estimate = match &f64_run {
        Ok(out) => {
            let shadow = assess_shadow(out, &dd_run);
            match shadow.decohered_at {
                None => shadow.divergence.max(f64::EPSILON) * eps_ratio * safety,
                Some(k) => extrapolate(k, SHADOW_LINEAR_LIMIT),
            }
        }
        Err(EngineError::DegenerateRecursion { k, .. })
        | Err(EngineError::IdentityResidual { k, .. }) => extrapolate(*k, 1.0),
        // The f64 backend failed in some way the dd backend did not (for
        // example an iteration cap in a special function); no divergence
        // information exists, so fall back to the conservative envelope.
        Err(_) => DoubleDouble::EPSILON * nf * (error_growth_rate(t) * nf).exp() * safety,
    };
    if !(estimate <= DELIVERABLE_ERROR) {
        return Err(EngineError::PrecisionExhausted { estimate });
    }
    Ok(dd_run)
}

fn check_ctx(ctx: &PrecisionContext) -> Result<(), EngineError> {
    if !ctx.is_valid() {
        return Err(EngineError::Domain("invalid precision context".into()));
    }
    Ok(())
}

/// Seed state of the recursion at index 0. Always evaluated in double-double
/// and rounded to the snapshot's f64 fields, so the seed is correct to the
/// last bit in either mode.
pub fn init_state(a: f64, t: f64, ctx: &PrecisionContext) -> Result<OPState, EngineError> {
    check_ctx(ctx)?;
    ModelParams::new(1, a, t)?;
    Ok(init_kernel::<DoubleDouble>(a, t)?.snapshot())
}

/// Single recursion step on an externally held state.
pub fn advance(state: &OPState, a: f64, t: f64, ctx: &PrecisionContext) -> Result<OPState, EngineError> {
    check_ctx(ctx)?;
    ModelParams::new(1, a, t)?;
    match ctx.mode {
        PrecisionMode::Standard => {
            let st = KernelState::<f64>::lift(state);
            Ok(advance_kernel(&st, a, t, ctx.recurrence_floor)?.snapshot())
        }
        PrecisionMode::Extended => {
            let st = KernelState::<DoubleDouble>::lift(state);
            Ok(advance_kernel(&st, a, t, ctx.recurrence_floor)?.snapshot())
        }
    }
}

/// F_N(t) with its log, H_N, and the full trace.
pub fn compute_cdf(params: &ModelParams, ctx: &PrecisionContext) -> Result<DistributionResult, EngineError> {
    check_ctx(ctx)?;
    params.validate()?;

    if params.t == 0.0 {
        let states = closed_table(params.n, params.a)?;
        return Ok(DistributionResult {
            f: 1.0,
            log_f: 0.0,
            h: Some(0.0),
            underflow: false,
            trace: Some(RecurrenceTrace {
                params: *params,
                states,
            }),
        });
    }

    let out = run_validated(params.n, params.a, params.t, ctx)?;
    let log_f = out.log_f;
    let underflow = log_f < LN_TINY;
    let f = if underflow { 0.0 } else { log_f.exp().min(1.0) };
    let nf = params.n as f64;
    let h = nf * (nf + params.a) + out.zeta_n;
    Ok(DistributionResult {
        f,
        log_f,
        h: Some(h),
        underflow,
        trace: Some(RecurrenceTrace {
            params: *params,
            states: out.states,
        }),
    })
}

/// H_N(t) = N(N+a) + zeta_N, straight from the trace.
pub fn compute_h(params: &ModelParams, ctx: &PrecisionContext) -> Result<f64, EngineError> {
    check_ctx(ctx)?;
    params.validate()?;
    if params.t == 0.0 {
        return Ok(0.0);
    }
    let out = run_validated(params.n, params.a, params.t, ctx)?;
    let nf = params.n as f64;
    Ok(nf * (nf + params.a) + out.zeta_n)
}

/// Density of the smallest eigenvalue, p_N(t) = -F_N(t) H_N(t) / t.
pub fn pdf_smallest(params: &ModelParams, ctx: &PrecisionContext) -> Result<f64, EngineError> {
    check_ctx(ctx)?;
    params.validate()?;
    if params.t == 0.0 {
        // p ~ c t^a as t -> 0+, so the a = 0 limit is N and a > 0 gives 0.
        return Ok(if params.a == 0.0 { params.n as f64 } else { 0.0 });
    }
    let res = compute_cdf(params, ctx)?;
    let h = res.h.expect("compute_cdf always fills H");
    Ok((-res.f * h / params.t).max(0.0))
}

fn hankel_size_limit(mode: PrecisionMode) -> u32 {
    match mode {
        PrecisionMode::Standard => 12,
        PrecisionMode::Extended => 30,
    }
}

/// Scaled Gram matrix of the truncated moments in the backend R:
/// A[i][j] = mu_{i+j}(t) / sqrt(mu_2i(0) mu_2j(0)) with mu_m = Gamma(m+a+1, t),
/// which keeps every entry in (0, ~1] so pivot magnitudes read as grading.
fn hankel_matrix<R: Real>(n: usize, a: f64, t: f64) -> Result<Vec<R>, EngineError> {
    let ar = R::from_f64(a);
    let tr = R::from_f64(t);
    let mut log_mu = Vec::with_capacity(2 * n - 1);
    for m in 0..=(2 * n - 2) {
        let nu = ar + R::from_f64(m as f64 + 1.0);
        let lm = if t == 0.0 {
            specialfns::lgamma_r(nu)?
        } else {
            specialfns::ln_upper_gamma_r(nu, tr)?
        };
        log_mu.push(lm);
    }
    let mut scale = Vec::with_capacity(n);
    for i in 0..n {
        let nu = R::from_f64(2.0 * i as f64 + 1.0) + ar;
        scale.push(specialfns::lgamma_r(nu)? * R::from_f64(0.5));
    }
    let mut m = vec![R::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = (log_mu[i + j] - scale[i] - scale[j]).exp();
        }
    }
    Ok(m)
}

/// Eliminate in double-double (whatever precision built the entries) and
/// certify the log determinant through the calibrated grading law. Returns
/// the factorization diagnostics and the certified decimal digits.
fn hankel_logdet(mut m: Vec<DoubleDouble>, n: usize, entry_eps: f64) -> (crate::linalg::LogDet, f64) {
    let det = crate::linalg::lu_logdet(&mut m, n);
    let certified = det.certified_digits(n, entry_eps);
    (det, certified)
}

fn lift_matrix(m: &[f64]) -> Vec<DoubleDouble> {
    m.iter().map(|&x| DoubleDouble::from_f64(x)).collect()
}

fn hankel_logdet_in_mode(
    n: usize,
    a: f64,
    t: f64,
    mode: PrecisionMode,
) -> Result<(crate::linalg::LogDet, f64), EngineError> {
    Ok(match mode {
        PrecisionMode::Standard => {
            let m = hankel_matrix::<f64>(n, a, t)?;
            hankel_logdet(lift_matrix(&m), n, f64::EPSILON)
        }
        PrecisionMode::Extended => {
            let m = hankel_matrix::<DoubleDouble>(n, a, t)?;
            hankel_logdet(m, n, DoubleDouble::EPSILON)
        }
    })
}

/// Independent determinant evaluation of F_N(t): the ratio of Hankel
/// determinants of truncated moments mu_m(t) = Gamma(m+a+1, t) at t and 0.
pub fn hankel_oracle_cdf(params: &ModelParams, ctx: &PrecisionContext) -> Result<f64, EngineError> {
    check_ctx(ctx)?;
    params.validate()?;
    let max = hankel_size_limit(ctx.mode);
    if params.n > max {
        return Err(EngineError::SizeLimit { n: params.n, max });
    }
    let n = params.n as usize;
    let (det_t, cert_t) = hankel_logdet_in_mode(n, params.a, params.t, ctx.mode)?;
    let (det_0, cert_0) = hankel_logdet_in_mode(n, params.a, 0.0, ctx.mode)?;
    if det_t.sign <= 0 || det_0.sign <= 0 {
        // Gram matrices of a positive measure are positive definite; a
        // non-positive computed determinant means the elimination is noise.
        return Err(EngineError::Conditioning {
            certified_digits: 0.0,
        });
    }
    let certified = cert_t.min(cert_0);
    if certified < 8.0 {
        return Err(EngineError::Conditioning {
            certified_digits: certified,
        });
    }
    Ok((det_t.log_abs - det_0.log_abs).exp())
}

fn stencil_first(fp2: f64, fp1: f64, fm1: f64, fm2: f64, h: f64) -> f64 {
    (-fp2 + 8.0 * fp1 - 8.0 * fm1 + fm2) / (12.0 * h)
}

fn stencil_second(fp2: f64, fp1: f64, f0: f64, fm1: f64, fm2: f64, h: f64) -> f64 {
    (-fp2 + 16.0 * fp1 - 30.0 * f0 + 16.0 * fm1 - fm2) / (12.0 * h * h)
}

fn rel_residual(lhs: f64, rhs: f64, unit: f64) -> f64 {
    (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(unit)
}

/// Residuals of the algebraic identities and, via finite differences over
/// shifted re-runs, of the Schlesinger equations and the sigma-form ODE.
pub fn validate_identities(trace: &RecurrenceTrace, ctx: &PrecisionContext) -> Result<IdentityReport, EngineError> {
    check_ctx(ctx)?;
    let params = &trace.params;
    params.validate()?;
    let n = params.n as usize;
    if trace.states.len() != n + 1 {
        return Err(EngineError::Domain(format!(
            "trace holds {} states, expected {}",
            trace.states.len(),
            n + 1
        )));
    }
    if params.t <= 0.0 {
        return Err(EngineError::Domain(
            "derivative-based identity checks need t > 0".into(),
        ));
    }
    let (a, t) = (params.a, params.t);

    let mut omega_sq = 0.0f64;
    for k in 1..=n {
        let lhs = trace.omega(k).powi(2);
        let rhs = trace.states[k].r * trace.theta(k) * trace.theta(k - 1);
        omega_sq = omega_sq.max(rel_residual(lhs, rhs, f64::MIN_POSITIVE));
    }

    let mut quadratic = 0.0f64;
    for k in 0..=n {
        let kf = k as f64;
        let theta = trace.theta(k);
        let omega = trace.omega(k);
        let zeta = trace.states[k].zeta;
        let t1 = omega * omega;
        let t2 = -theta * (theta - a - 2.0 * kf + t) * omega;
        let t3 = -theta * (kf * t * (kf + a) + (theta + t) * zeta);
        let scale = t1.abs().max(t2.abs()).max(t3.abs()).max(f64::MIN_POSITIVE);
        quadratic = quadratic.max((t1 + t2 + t3).abs() / scale);
    }

    // Four re-runs at t(1 +- delta), t(1 +- 2 delta) feed the 4th-order
    // stencils; the trace itself provides the center values.
    let h = FD_RELATIVE_STEP * t;
    let shifts = [t + 2.0 * h, t + h, t - h, t - 2.0 * h];
    let mut runs = Vec::with_capacity(4);
    for ts in shifts {
        runs.push(run_validated(params.n, a, ts, ctx)?);
    }

    let mut schlesinger_s = 0.0f64;
    let mut schlesinger_r = 0.0f64;
    for k in 0..n {
        let s_dot = stencil_first(
            runs[0].states[k].s,
            runs[1].states[k].s,
            runs[2].states[k].s,
            runs[3].states[k].s,
            h,
        );
        let lhs_s = trace.states[k].s - trace.states[k + 1].r + trace.states[k].r;
        schlesinger_s = schlesinger_s.max(rel_residual(lhs_s, t * s_dot, 1.0));

        let ln_r_dot = stencil_first(
            runs[0].states[k + 1].r.ln(),
            runs[1].states[k + 1].r.ln(),
            runs[2].states[k + 1].r.ln(),
            runs[3].states[k + 1].r.ln(),
            h,
        );
        let lhs_r = 2.0 - trace.states[k + 1].s + trace.states[k].s;
        schlesinger_r = schlesinger_r.max(rel_residual(lhs_r, t * ln_r_dot, 1.0));
    }

    let nf = params.n as f64;
    let nna = nf * (nf + a);
    let h_of = |out: &RunOutput| nna + out.zeta_n;
    let h0 = nna + trace.states[n].zeta;
    let h_p = stencil_first(h_of(&runs[0]), h_of(&runs[1]), h_of(&runs[2]), h_of(&runs[3]), h);
    let h_pp = stencil_second(h_of(&runs[0]), h_of(&runs[1]), h0, h_of(&runs[2]), h_of(&runs[3]), h);
    let painleve_v = crate::painleve::p5_residual(h0, h_p, h_pp, t, params.n, a).abs();

    Ok(IdentityReport {
        omega_sq,
        quadratic,
        schlesinger_s,
        schlesinger_r,
        painleve_v,
    })
}
