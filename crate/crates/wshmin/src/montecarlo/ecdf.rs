//! Empirical CDF, Kolmogorov-Smirnov distance, and the finite-size
//! correction diagnostic.

use crate::painleve::{limiting_cdf, PIIISolution};

use super::McError;

/// Sorted sample set with step-function survival queries.
#[derive(Debug, Clone)]
pub struct EmpiricalCDF {
    values: Vec<f64>,
}

impl EmpiricalCDF {
    /// Sorts and validates: samples must be finite and strictly positive
    /// (smallest eigenvalues of a full-rank Wishart matrix always are).
    pub fn from_samples(mut samples: Vec<f64>) -> Result<Self, McError> {
        if samples.is_empty() {
            return Err(McError::Domain("empty sample set".into()));
        }
        if samples.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(McError::Domain(
                "samples must be finite and strictly positive".into(),
            ));
        }
        samples.sort_unstable_by(f64::total_cmp);
        Ok(EmpiricalCDF { values: samples })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Sorted ascending.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Empirical survival probability: the fraction of samples >= t.
    pub fn survival(&self, t: f64) -> f64 {
        let below = self.values.partition_point(|&v| v < t);
        (self.values.len() - below) as f64 / self.values.len() as f64
    }
}

/// Sup-distance between the empirical survival function and an exact one,
/// evaluated over the sample points. Both sides of each step are checked,
/// so the supremum over all of (0, inf) is attained up to the exact
/// function's variation between consecutive samples.
pub fn ks_distance<F: Fn(f64) -> f64>(emp: &EmpiricalCDF, exact: F) -> f64 {
    let n = emp.len() as f64;
    let mut sup = 0.0f64;
    for (i, &v) in emp.values().iter().enumerate() {
        let e = exact(v);
        let before = (emp.len() - i) as f64 / n;
        let after = (emp.len() - i - 1) as f64 / n;
        sup = sup.max((e - before).abs()).max((e - after).abs());
    }
    sup
}

/// One row of the finite-size correction table at scaled position x.
#[derive(Debug, Clone)]
pub struct CorrectionRow {
    pub x: f64,
    /// N log( F_N_hat(x/N) / F_inf(x) ), the measured size-N deviation.
    pub diagnostic: f64,
    /// (a/2) f(x), the predicted limit of the diagnostic.
    pub prediction: f64,
    /// Binomial standard error propagated through the logarithm.
    pub std_error: f64,
    /// Set when fewer than 50 samples survive past x/N; the row is then
    /// reported but should not be scored.
    pub insufficient: bool,
}

/// Compare the measured deviation of the empirical CDF from the hard-edge
/// limit law against its predicted first-order correction, at each grid
/// point. `p3` must be the Painleve III solution for this `a`.
pub fn correction_diagnostic(
    emp: &EmpiricalCDF,
    n: u32,
    a: f64,
    p3: &PIIISolution,
    grid: &[f64],
) -> Result<Vec<CorrectionRow>, McError> {
    if n < 1 {
        return Err(McError::Domain("matrix size must be at least 1".into()));
    }
    if a != p3.a {
        return Err(McError::Domain(format!(
            "parameter mismatch: a = {a} but the Painleve solution carries a = {}",
            p3.a
        )));
    }
    let nf = f64::from(n);
    let count = emp.len() as f64;
    let mut rows = Vec::with_capacity(grid.len());
    for &x in grid {
        if !x.is_finite() || x < 0.0 {
            return Err(McError::Domain(format!("grid point {x} out of range")));
        }
        let surv = emp.survival(x / nf);
        let f_inf = limiting_cdf(p3, x)?;
        let insufficient = surv * count < 50.0;
        let (diagnostic, std_error) = if surv > 0.0 {
            (
                nf * (surv / f_inf).ln(),
                nf * (surv * (1.0 - surv) / count).sqrt() / surv,
            )
        } else {
            (f64::NAN, f64::NAN)
        };
        let prediction = if a == 0.0 { 0.0 } else { 0.5 * a * p3.f_at(x)? };
        rows.push(CorrectionRow { x, diagnostic, prediction, std_error, insufficient });
    }
    Ok(rows)
}
