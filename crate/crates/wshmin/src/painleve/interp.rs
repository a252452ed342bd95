//! Two-point Hermite interpolation on one grid interval.
//!
//! The solvers in this module report values and one or two derivatives on
//! dense grids; evaluating between nodes then never needs more than the
//! enclosing interval. With node spacing h the cubic form is O(h^4)
//! accurate and the quintic O(h^6), both far below the solver tolerances.

/// Cubic Hermite from (y, y') at the interval ends; `s` in [0, 1],
/// `h` the interval width.
pub(super) fn cubic(s: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Quintic Hermite from (y, y', y'') at the interval ends.
pub(super) fn quintic(
    s: f64,
    h: f64,
    y0: f64,
    d0: f64,
    c0: f64,
    y1: f64,
    d1: f64,
    c1: f64,
) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
    let h3 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 0.5 * s3 - s4 + 0.5 * s5;
    h0 * y0 + h1 * h * d0 + h2 * h * h * c0 + h3 * y1 + h4 * h * d1 + h5 * h * h * c1
}
