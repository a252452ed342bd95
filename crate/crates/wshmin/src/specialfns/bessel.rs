//! Modified Bessel function I_n of integer order, by the ascending series
//! I_n(x) = Sum_k (x/2)^{n+2k} / (k! (n+k)!). All terms are positive, so
//! there is no cancellation and the relative error tracks the backend
//! epsilon. Good for the argument range this crate uses (x up to ~50).

use super::SpecialFnError;
use crate::dd::DoubleDouble;
use crate::precision::{PrecisionContext, PrecisionMode};
use crate::real::Real;

const MAX_TERMS: usize = 20_000;

/// I_n(x) for integer n (any sign, via I_{-n} = I_n) and x >= 0.
pub(crate) fn bessel_i_r<R: Real>(n: i32, x: R) -> Result<R, SpecialFnError> {
    if x < R::zero() {
        return Err(SpecialFnError::Domain(format!(
            "bessel_i requires x >= 0, got {:?}",
            x
        )));
    }
    let n = n.unsigned_abs();
    let half_x = x * R::from_f64(0.5);

    if x.to_f64() == 0.0 {
        return Ok(if n == 0 { R::one() } else { R::zero() });
    }

    // Leading term (x/2)^n / n!.
    let mut term = R::one();
    for i in 1..=n {
        term = term * half_x / R::from_f64(i as f64);
    }

    let q = half_x * half_x;
    let mut sum = term;
    for k in 0..MAX_TERMS {
        term = term * q / R::from_f64(((k + 1) * (n as usize + k + 1)) as f64);
        sum += term;
        if term < sum * R::from_f64(R::epsilon()) {
            return Ok(sum);
        }
    }
    Err(SpecialFnError::PrecisionUnattainable(format!(
        "bessel series stalled at n={}, x={:?}",
        n, x
    )))
}

pub fn bessel_i(n: i32, x: f64, ctx: &PrecisionContext) -> Result<f64, SpecialFnError> {
    match ctx.mode {
        PrecisionMode::Standard => bessel_i_r::<f64>(n, x),
        PrecisionMode::Extended => {
            bessel_i_r::<DoubleDouble>(n, DoubleDouble::from_f64(x)).map(|v| v.to_f64())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx() -> PrecisionContext {
        PrecisionContext::standard()
    }

    #[test]
    fn values_at_origin() {
        assert_eq!(bessel_i(0, 0.0, &ctx()).unwrap(), 1.0);
        assert_eq!(bessel_i(2, 0.0, &ctx()).unwrap(), 0.0);
        assert_eq!(bessel_i(-3, 0.0, &ctx()).unwrap(), 0.0);
    }

    #[test]
    fn reference_values() {
        // Partial sums of the ascending series, frozen independently.
        assert_relative_eq!(
            bessel_i(0, 2.0, &ctx()).unwrap(),
            2.2795853023360673,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            bessel_i(2, 2.0, &ctx()).unwrap(),
            0.6889484476987382,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            bessel_i(1, 1.0, &ctx()).unwrap(),
            0.5651591039924851,
            max_relative = 1e-12
        );
    }

    #[test]
    fn negative_order_symmetry() {
        for &x in &[0.5, 2.0, 11.0] {
            assert_eq!(
                bessel_i(3, x, &ctx()).unwrap(),
                bessel_i(-3, x, &ctx()).unwrap()
            );
        }
    }

    #[test]
    fn extended_agrees_with_standard() {
        let ext = PrecisionContext::extended();
        for &(n, x) in &[(0, 2.0), (2, 6.3), (5, 18.0), (1, 40.0)] {
            let s = bessel_i(n, x, &ctx()).unwrap();
            let e = bessel_i(n, x, &ext).unwrap();
            assert_relative_eq!(s, e, max_relative = 1e-14);
        }
    }

    #[test]
    fn rejects_negative_argument() {
        assert!(matches!(
            bessel_i(0, -1.0, &ctx()),
            Err(SpecialFnError::Domain(_))
        ));
    }
}
