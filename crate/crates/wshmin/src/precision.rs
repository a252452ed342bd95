//! Precision policy shared by all numeric kernels.
//!
//! Every public entry point that does nontrivial numerics accepts a
//! [`PrecisionContext`]. `Standard` runs in f64; `Extended` runs the same
//! generic kernels in double-double arithmetic (about 31 significant decimal
//! digits, see [`crate::dd`]). Callers that hit a precision failure in
//! standard mode (a recurrence coefficient collapsing to the floor, or an
//! internal identity check drifting past its tolerance) retry in extended
//! mode before reporting an error.

use std::fmt;

/// Arithmetic backend selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrecisionMode {
    /// IEEE f64 arithmetic, roughly 15-16 significant decimal digits.
    Standard,
    /// Double-double arithmetic, roughly 31 significant decimal digits.
    Extended,
}

impl fmt::Display for PrecisionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrecisionMode::Standard => write!(f, "standard"),
            PrecisionMode::Extended => write!(f, "extended"),
        }
    }
}

/// Numeric working context: mode, target accuracy, and guard thresholds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionContext {
    pub mode: PrecisionMode,
    /// Significant decimal digits the backend can represent. Informational;
    /// series termination uses `tolerance`.
    pub decimal_digits: u32,
    /// Relative tolerance for series/iteration termination.
    pub tolerance: f64,
    /// Smallest admissible value for the recurrence coefficient `R_k`.
    /// Values at or below this floor mean the forward recursion has lost all
    /// significance and the caller must escalate or abort.
    pub recurrence_floor: f64,
}

impl PrecisionContext {
    /// Standard f64 context.
    pub fn standard() -> Self {
        PrecisionContext {
            mode: PrecisionMode::Standard,
            decimal_digits: 15,
            tolerance: 1e-15,
            recurrence_floor: 1e-250,
        }
    }

    /// Extended double-double context.
    pub fn extended() -> Self {
        PrecisionContext {
            mode: PrecisionMode::Extended,
            decimal_digits: 31,
            tolerance: 1e-30,
            recurrence_floor: 1e-250,
        }
    }

    pub fn with_mode(mode: PrecisionMode) -> Self {
        match mode {
            PrecisionMode::Standard => Self::standard(),
            PrecisionMode::Extended => Self::extended(),
        }
    }

    /// Context selected by the `WSHART_PRECISION` environment variable
    /// (`standard` or `extended`, case-insensitive). Unset or unrecognized
    /// values fall back to standard.
    pub fn from_env() -> Self {
        match std::env::var("WSHART_PRECISION") {
            Ok(v) if v.eq_ignore_ascii_case("extended") => Self::extended(),
            _ => Self::standard(),
        }
    }

    /// Internal consistency checks; used by constructors in debug builds and
    /// by the property tests.
    pub fn is_valid(&self) -> bool {
        self.decimal_digits >= 15
            && self.tolerance > 0.0
            && self.tolerance <= 1e-10
            && self.recurrence_floor > 0.0
            && self.recurrence_floor < 1e-100
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        assert!(PrecisionContext::standard().is_valid());
        assert!(PrecisionContext::extended().is_valid());
        assert_eq!(PrecisionContext::default().mode, PrecisionMode::Standard);
    }

    #[test]
    fn extended_is_tighter() {
        let s = PrecisionContext::standard();
        let e = PrecisionContext::extended();
        assert!(e.tolerance < s.tolerance);
        assert!(e.decimal_digits > s.decimal_digits);
    }

    #[test]
    fn mode_display() {
        assert_eq!(PrecisionMode::Standard.to_string(), "standard");
        assert_eq!(PrecisionMode::Extended.to_string(), "extended");
    }
}
