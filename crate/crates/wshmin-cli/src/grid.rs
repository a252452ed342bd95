//! `start:stop:count` grid syntax.
//!
//! Both endpoints are included and the spacing is uniform; a grid is valid
//! only if it is strictly increasing (or a single point with start = stop).
//! Parsing is total: any string either yields a [`GridSpec`] or an error,
//! never a panic, so untrusted input can be fed here directly.

use std::fmt;

/// Hard cap on the point count; bounds the allocation a hostile grid string
/// can request.
pub const MAX_GRID_POINTS: usize = 4_194_304;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    /// Materializes the grid. The last point is exactly `stop`, not the
    /// rounded lerp value, so endpoint arithmetic stays exact.
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let span = self.stop - self.start;
        let denom = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + span * (i as f64 / denom)
                }
            })
            .collect()
    }
}

/// Canonical form, used verbatim in output metadata.
impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

pub fn parse_grid(text: &str) -> Result<GridSpec, String> {
    let trimmed = text.trim();
    let mut parts = trimmed.split(':');
    let (Some(raw_start), Some(raw_stop), Some(raw_count), None) =
        (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err(format!(
            "grid must be start:stop:count, got {trimmed:?}"
        ));
    };
    let start: f64 = raw_start
        .parse()
        .map_err(|_| format!("bad grid start {raw_start:?}"))?;
    let stop: f64 = raw_stop
        .parse()
        .map_err(|_| format!("bad grid stop {raw_stop:?}"))?;
    let count: usize = raw_count
        .parse()
        .map_err(|_| format!("bad grid count {raw_count:?}"))?;
    if !start.is_finite() || !stop.is_finite() {
        return Err("grid endpoints must be finite".into());
    }
    if count == 0 {
        return Err("grid count must be at least 1".into());
    }
    if count > MAX_GRID_POINTS {
        return Err(format!("grid count {count} exceeds the cap {MAX_GRID_POINTS}"));
    }
    if count == 1 {
        if start != stop {
            return Err("a single-point grid needs start = stop".into());
        }
    } else if !(stop > start) {
        return Err(format!(
            "grid must be strictly increasing, got start {start} stop {stop}"
        ));
    }
    Ok(GridSpec { start, stop, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_materializes_inclusive_grids() {
        let g = parse_grid("0:0.1:41").unwrap();
        assert_eq!(g, GridSpec { start: 0.0, stop: 0.1, count: 41 });
        let pts = g.points();
        assert_eq!(pts.len(), 41);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[40], 0.1);
        for w in pts.windows(2) {
            assert!(w[1] > w[0]);
        }

        let one = parse_grid(" 2.5:2.5:1 ").unwrap();
        assert_eq!(one.points(), vec![2.5]);

        assert_eq!(parse_grid("-8:10:5").unwrap().points().len(), 5);
        assert_eq!(g.to_string(), "0:0.1:41");
    }

    #[test]
    fn endpoint_is_exact_not_lerped() {
        let pts = parse_grid("0.1:0.3:2").unwrap().points();
        assert_eq!(pts[1].to_bits(), 0.3f64.to_bits());
    }

    #[test]
    fn rejects_malformed_and_degenerate_grids() {
        for bad in [
            "", "1", "1:2", "1:2:3:4", "a:2:3", "1:b:3", "1:2:c", "1:2:-3",
            "nan:2:3", "1:inf:3", "1:2:0", "2:1:5", "1:1:5", "1:2:3 x",
            "::", "1::3",
        ] {
            assert!(parse_grid(bad).is_err(), "accepted {bad:?}");
        }
        let over = format!("0:1:{}", MAX_GRID_POINTS + 1);
        assert!(parse_grid(&over).is_err());
        assert!(parse_grid(&format!("0:1:{MAX_GRID_POINTS}")).is_ok());
    }
}
