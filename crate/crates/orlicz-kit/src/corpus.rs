//! Seeded corpus of compactly supported test fields, described in continuum terms so
//! that the same instance can be resampled at any spacing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fields_norms::{Grid, SampledField};

/// Exponents for the truncated radial singularities `|x − a|^{-β}`.
pub const RADIAL_BETAS: [f64; 3] = [0.2, 0.3, 0.4];

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FieldSpec {
    /// `height·χ_{B(a,r)}`.
    Indicator { center: [f64; 2], radius: f64, height: f64 },
    /// `c` on the cube `[-s, s]ⁿ`.
    Constant { c: f64, half_side: f64 },
    /// `height·min(|x − a|^{-β}, (h/2)^{-β})` on `B(a, r)`.
    RadialPower { center: [f64; 2], radius: f64, beta: f64, height: f64 },
    /// `high` on `B(a, r/2)`, `low` on the rest of `B(a, r)`.
    TwoLevel { center: [f64; 2], radius: f64, high: f64, low: f64 },
    /// Piecewise constant on 16 equal cells of `[-1, 1]` (4 × 4 in 2D).
    Steps { levels: Vec<f64> },
    /// `min(1/|x|, 1/h)` on `|x| < R`.
    TruncatedReciprocal { radius: f64 },
}

fn dist(x: [f64; 2], a: [f64; 2], dim: usize) -> f64 {
    let dx = x[0] - a[0];
    if dim == 1 {
        dx.abs()
    } else {
        (dx * dx + (x[1] - a[1]).powi(2)).sqrt()
    }
}

impl FieldSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            FieldSpec::Indicator { .. } => "indicator",
            FieldSpec::Constant { .. } => "constant",
            FieldSpec::RadialPower { .. } => "radial_power",
            FieldSpec::TwoLevel { .. } => "two_level",
            FieldSpec::Steps { .. } => "steps",
            FieldSpec::TruncatedReciprocal { .. } => "truncated_reciprocal",
        }
    }

    pub fn sample(&self, grid: Grid) -> SampledField {
        let dim = grid.dim;
        let h = grid.h;
        match self {
            FieldSpec::Indicator { center, radius, height } => SampledField::from_fn(grid, |x| {
                if dist(x, *center, dim) < *radius {
                    *height
                } else {
                    0.0
                }
            }),
            FieldSpec::Constant { c, half_side } => SampledField::from_fn(grid, |x| {
                let inside = x[0].abs() <= *half_side && (dim == 1 || x[1].abs() <= *half_side);
                if inside {
                    *c
                } else {
                    0.0
                }
            }),
            FieldSpec::RadialPower { center, radius, beta, height } => {
                let cap = (h / 2.0).powf(-beta);
                SampledField::from_fn(grid, |x| {
                    let d = dist(x, *center, dim);
                    if d < *radius {
                        height * d.powf(-beta).min(cap)
                    } else {
                        0.0
                    }
                })
            }
            FieldSpec::TwoLevel { center, radius, high, low } => SampledField::from_fn(grid, |x| {
                let d = dist(x, *center, dim);
                if d < radius / 2.0 {
                    *high
                } else if d < *radius {
                    *low
                } else {
                    0.0
                }
            }),
            FieldSpec::Steps { levels } => {
                let per_axis = if dim == 1 { 16 } else { 4 };
                let cell = |t: f64| -> Option<usize> {
                    if t < -1.0 || t >= 1.0 {
                        return None;
                    }
                    Some((((t + 1.0) / 2.0) * per_axis as f64).floor().min(per_axis as f64 - 1.0) as usize)
                };
                SampledField::from_fn(grid, |x| {
                    let i = cell(x[0]);
                    let j = if dim == 1 { Some(0) } else { cell(x[1]) };
                    match (i, j) {
                        (Some(i), Some(j)) => levels[i * if dim == 1 { 1 } else { per_axis } + j],
                        _ => 0.0,
                    }
                })
            }
            FieldSpec::TruncatedReciprocal { radius } => SampledField::from_fn(grid, |x| {
                let d = dist(x, [0.0, 0.0], dim);
                if d < *radius {
                    (1.0 / d).min(1.0 / h)
                } else {
                    0.0
                }
            }),
        }
    }
}

/// `count` fields cycling through indicator, constant, radial power, two-level and steps,
/// supported in `[-1.5, 1.5]ⁿ`.
pub fn generate(count: usize, dim: usize, seed: u64) -> Vec<FieldSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let center = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(-0.5..0.5);
        let b = if dim == 2 { rng.gen_range(-0.5..0.5) } else { 0.0 };
        [a, b]
    };
    (0..count)
        .map(|i| match i % 5 {
            0 => FieldSpec::Indicator {
                center: center(&mut rng),
                radius: rng.gen_range(0.2..1.0),
                height: rng.gen_range(0.5..3.0),
            },
            1 => FieldSpec::Constant { c: rng.gen_range(0.5..3.0), half_side: rng.gen_range(0.3..1.0) },
            2 => FieldSpec::RadialPower {
                center: center(&mut rng),
                radius: rng.gen_range(0.3..1.0),
                beta: RADIAL_BETAS[rng.gen_range(0..RADIAL_BETAS.len())],
                height: rng.gen_range(0.5..2.0),
            },
            3 => FieldSpec::TwoLevel {
                center: center(&mut rng),
                radius: rng.gen_range(0.3..1.0),
                high: rng.gen_range(1.5..3.0),
                low: rng.gen_range(0.2..1.5),
            },
            _ => {
                let cells = 16;
                let levels = (0..cells)
                    .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.1..3.0) })
                    .collect();
                FieldSpec::Steps { levels }
            }
        })
        .collect()
}

/// Random step fields for the weak-type identity: `k` levels on random sub-intervals.
pub fn step_fields(count: usize, seed: u64) -> Vec<FieldSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let distinct: Vec<f64> = (0..rng.gen_range(1..=5)).map(|_| rng.gen_range(0.1..4.0)).collect();
            let levels = (0..16)
                .map(|_| if rng.gen_bool(0.3) { 0.0 } else { distinct[rng.gen_range(0..distinct.len())] })
                .collect();
            FieldSpec::Steps { levels }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_cycling() {
        let a = generate(10, 1, 7);
        assert_eq!(a, generate(10, 1, 7));
        assert_ne!(a, generate(10, 1, 8));
        let kinds: Vec<&str> = a.iter().map(|f| f.kind()).collect();
        assert_eq!(&kinds[..5], &["indicator", "constant", "radial_power", "two_level", "steps"]);
    }

    #[test]
    fn supports_fit_the_window() {
        let g = Grid::new(1, 2.0, 0.01).unwrap();
        for spec in generate(25, 1, 1) {
            let f = spec.sample(g);
            assert!(f.values.iter().all(|v| v.is_finite() && *v >= 0.0));
            assert_eq!(f.values[0], 0.0);
            assert_eq!(*f.values.last().unwrap(), 0.0);
        }
    }

    #[test]
    fn radial_cap_scales_with_h() {
        let spec = FieldSpec::RadialPower { center: [0.0, 0.0], radius: 0.5, beta: 0.4, height: 1.0 };
        let g = Grid::new(1, 1.0, 0.01).unwrap();
        let f = spec.sample(g);
        assert!((f.sup_abs() - 0.005f64.powf(-0.4)).abs() < 1e-9);
    }

    #[test]
    fn two_dimensional_steps() {
        let spec = FieldSpec::Steps { levels: (0..16).map(|k| k as f64).collect() };
        let g = Grid::new(2, 1.0, 0.1).unwrap();
        let f = spec.sample(g);
        assert_eq!(f.sup_abs(), 15.0);
    }
}
