//! Log-spaced sampling grids used by every finite-sample class check.

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl LogGrid {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        assert!(min > 0.0 && max > min && points >= 2, "invalid log grid");
        LogGrid { min, max, points }
    }

    /// The default `t`/`u` grid: 400 points over `[1e-8, 1e8]`.
    pub fn default_t() -> Self {
        LogGrid::new(1e-8, 1e8, 400)
    }

    /// The default radius grid for condition reports: 200 points over `[1e-6, 1e6]`.
    pub fn default_r() -> Self {
        LogGrid::new(1e-6, 1e6, 200)
    }

    pub fn values(&self) -> Vec<f64> {
        let (a, b) = (self.min.ln(), self.max.ln());
        let n = self.points - 1;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.min
                } else if i == n {
                    self.max
                } else {
                    (a + (b - a) * i as f64 / n as f64).exp()
                }
            })
            .collect()
    }

    /// Values plus the sentinels `0` and `∞`.
    pub fn values_with_sentinels(&self) -> Vec<f64> {
        let mut v = vec![0.0];
        v.extend(self.values());
        v.push(f64::INFINITY);
        v
    }

    /// Range widened by 10× on each side with doubled density: the stability probe.
    pub fn extended(&self) -> Self {
        LogGrid::new(self.min / 10.0, self.max * 10.0, 2 * self.points - 1)
    }
}

/// `{base^{k/den}}` for `k` in `lo..=hi`.
pub fn geometric(base: f64, den: i32, lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| base.powf(k as f64 / den as f64)).collect()
}

/// Relative change `|b/a - 1|`, with `0` for identical values and `∞` when only one is finite.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else if !a.is_finite() || !b.is_finite() || a == 0.0 {
        f64::INFINITY
    } else {
        (b / a - 1.0).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = LogGrid::new(1e-3, 1e3, 7);
        let v = g.values();
        assert_eq!(v[0], 1e-3);
        assert_eq!(v[6], 1e3);
        assert!((v[3] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn extension_contains_original_range() {
        let g = LogGrid::default_t().extended();
        assert_eq!(g.points, 799);
        assert!((g.min - 1e-9).abs() < 1e-24);
    }

    #[test]
    fn relative_change_cases() {
        assert_eq!(relative_change(2.0, 2.0), 0.0);
        assert_eq!(relative_change(f64::INFINITY, f64::INFINITY), 0.0);
        assert_eq!(relative_change(1.0, f64::INFINITY), f64::INFINITY);
        assert!((relative_change(2.0, 2.2) - 0.1).abs() < 1e-12);
    }
}

/// Smallest `C` with `v_i ≤ C·v_j` for all `i < j`: the almost-increasing constant of a
/// sampled sequence. Pairs are compared with [`crate::ext::ratio`], so `0/0` and `∞/∞`
/// are skipped and `x/0` is infinite.
pub fn almost_increasing_constant(values: &[f64]) -> f64 {
    let mut best: f64 = 1.0;
    let mut running: Option<f64> = None;
    for &v in values {
        if let Some(m) = running {
            if let Some(r) = crate::ext::ratio(m, v) {
                best = best.max(r);
            }
        }
        running = Some(running.map_or(v, |m| m.max(v)));
    }
    best
}

/// Smallest `C` with `v_j ≤ C·v_i` for all `i < j`.
pub fn almost_decreasing_constant(values: &[f64]) -> f64 {
    let rev: Vec<f64> = values.iter().rev().copied().collect();
    almost_increasing_constant(&rev)
}

#[cfg(test)]
mod monotone_tests {
    use super::*;

    #[test]
    fn increasing_sequence_has_constant_one() {
        assert_eq!(almost_increasing_constant(&[1.0, 2.0, 3.0]), 1.0);
        assert_eq!(almost_decreasing_constant(&[3.0, 2.0, 1.0]), 1.0);
    }

    #[test]
    fn dip_is_measured() {
        assert_eq!(almost_increasing_constant(&[1.0, 4.0, 2.0, 8.0]), 2.0);
    }

    #[test]
    fn zero_after_positive_is_infinite() {
        assert_eq!(almost_increasing_constant(&[1.0, 0.0]), f64::INFINITY);
        assert_eq!(almost_increasing_constant(&[0.0, 0.0, 1.0]), 1.0);
    }
}
