//! The uncentered maximal operator `M`, the fractional maximal operator `M_ρ` and the
//! generalized fractional integral `I_ρ` on sampled fields.
//!
//! For one radius the maximal value at `x` is the largest lattice mean over family balls
//! `B(c, r) ∋ x`. Since `x ∈ B(c, r)` iff `c ∈ B(x, r)` on the lattice, this is a
//! dilation of the centre-mean array by the ball shape: a sliding-window max per row.

use std::collections::VecDeque;

use serde::Serialize;

use crate::fields_norms::{Ball, BallFamily, BallSample, BallShape, FieldError, Grid, SampledField};
use crate::par;
use crate::quad::integral_to_zero;
use crate::weights_kernels::{check_int_rho, KernelFunction};
use crate::young_calc::YoungFunction;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum OperatorError {
    #[error("ball family leaves {0} grid points uncovered")]
    Coverage(usize),
    #[error("integral condition violated: {0}")]
    IntegralCondition(String),
    #[error("support condition violated: {0}")]
    Support(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorMeta {
    pub operator: String,
    pub kernel: Option<String>,
    pub family: Option<FamilySummary>,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilySummary {
    pub centers: usize,
    pub radii: Vec<f64>,
}

impl FamilySummary {
    fn of(family: &BallFamily) -> Self {
        FamilySummary { centers: family.centers.len(), radii: family.radii.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OperatorResult {
    pub field: SampledField,
    pub meta: OperatorMeta,
}

/// Sliding max over windows `[i − w, i + w]` (clamped to the row).
fn sliding_max(row: &[f64], w: usize, out: &mut [f64]) {
    let n = row.len();
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0;
    for i in 0..n {
        let hi = (i + w).min(n - 1);
        while next <= hi {
            while dq.back().is_some_and(|&b| row[b] <= row[next]) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        while dq.front().is_some_and(|&f| f + w < i) {
            dq.pop_front();
        }
        out[i] = row[*dq.front().expect("window is nonempty")];
    }
}

/// Lattice means of `|f|` over `B(c, r)` at family centres; `-∞` elsewhere.
fn centre_means(f: &SampledField, centers: &[[usize; 2]], shape: &BallShape) -> Vec<f64> {
    let g = &f.grid;
    let side = g.side;
    let count = shape.count() as f64;
    let mut out = vec![f64::NEG_INFINITY; g.len()];
    let abs: Vec<f64> = f.values.iter().map(|v| v.abs()).collect();
    if g.dim == 1 {
        let mut prefix = vec![0.0; side + 1];
        for i in 0..side {
            prefix[i + 1] = prefix[i] + abs[i];
        }
        let m = shape.m as i64;
        for c in centers {
            let i = c[0] as i64;
            let lo = (i - m).clamp(0, side as i64) as usize;
            let hi = (i + m + 1).clamp(0, side as i64) as usize;
            out[c[0]] = (prefix[hi] - prefix[lo]) / count;
        }
    } else {
        let mut prefix = vec![0.0; side * (side + 1)];
        for i in 0..side {
            for j in 0..side {
                prefix[i * (side + 1) + j + 1] = prefix[i * (side + 1) + j] + abs[i * side + j];
            }
        }
        let m = shape.m as i64;
        for c in centers {
            let (ci, cj) = (c[0] as i64, c[1] as i64);
            let mut acc = 0.0;
            for (k, &w) in shape.widths.iter().enumerate() {
                let i = ci + k as i64 - m;
                if i < 0 || i >= side as i64 {
                    continue;
                }
                let lo = (cj - w as i64).clamp(0, side as i64) as usize;
                let hi = (cj + w as i64 + 1).clamp(0, side as i64) as usize;
                let base = i as usize * (side + 1);
                acc += prefix[base + hi] - prefix[base + lo];
            }
            out[c[0] * side + c[1]] = acc / count;
        }
    }
    out
}

/// `max_{c : x ∈ B(c,r)} a(c)` for every grid point `x`.
fn dilate(a: &[f64], grid: &Grid, shape: &BallShape) -> Vec<f64> {
    let side = grid.side;
    if grid.dim == 1 {
        let mut out = vec![0.0; side];
        sliding_max(a, shape.m, &mut out);
        return out;
    }
    let mut distinct: Vec<usize> = shape.widths.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let row_max: Vec<Vec<f64>> = distinct
        .iter()
        .map(|&w| {
            let mut buf = vec![0.0; a.len()];
            for i in 0..side {
                sliding_max(&a[i * side..(i + 1) * side], w, &mut buf[i * side..(i + 1) * side]);
            }
            buf
        })
        .collect();
    let slot = |w: usize| distinct.binary_search(&w).expect("width present");
    let m = shape.m as i64;
    let mut out = vec![f64::NEG_INFINITY; a.len()];
    for (k, &w) in shape.widths.iter().enumerate() {
        let rm = &row_max[slot(w)];
        let di = k as i64 - m;
        for i in 0..side as i64 {
            let src = i + di;
            if src < 0 || src >= side as i64 {
                continue;
            }
            let (dst_row, src_row) = (i as usize * side, src as usize * side);
            for j in 0..side {
                let v = rm[src_row + j];
                if v > out[dst_row + j] {
                    out[dst_row + j] = v;
                }
            }
        }
    }
    out
}

/// `sup_{B ∈ F, B ∋ x} weight(r)·⨍_B |f|` on the grid.
fn family_maximal<W: Fn(f64) -> f64 + Sync>(
    f: &SampledField,
    family: &BallFamily,
    weight: W,
) -> Result<SampledField, OperatorError> {
    let g = f.grid;
    let per_radius = par::map_slice(&family.radii, |&r| {
        let shape = BallShape::new(g.dim, g.h, r);
        let scale = weight(r);
        let mut means = centre_means(f, &family.centers, &shape);
        for v in means.iter_mut().filter(|v| v.is_finite()) {
            *v *= scale;
        }
        dilate(&means, &g, &shape)
    });
    let mut out = vec![f64::NEG_INFINITY; g.len()];
    for layer in &per_radius {
        for (o, &v) in out.iter_mut().zip(layer) {
            if v > *o {
                *o = v;
            }
        }
    }
    let uncovered = out.iter().filter(|v| **v == f64::NEG_INFINITY).count();
    if uncovered > 0 {
        return Err(OperatorError::Coverage(uncovered));
    }
    Ok(SampledField { grid: g, values: out })
}

/// Uncentered Hardy-Littlewood maximal function over the family.
pub fn hl_maximal(f: &SampledField, family: &BallFamily) -> Result<OperatorResult, OperatorError> {
    let field = family_maximal(f, family, |_| 1.0)?;
    Ok(OperatorResult {
        field,
        meta: OperatorMeta {
            operator: "M".into(),
            kernel: None,
            family: Some(FamilySummary::of(family)),
            diagnostics: vec![],
        },
    })
}

/// `M_ρ f(x) = sup_{B(a,r) ∋ x} ρ(r) ⨍_B |f|` over the family.
pub fn frac_maximal(
    f: &SampledField,
    rho: &KernelFunction,
    family: &BallFamily,
) -> Result<OperatorResult, OperatorError> {
    let field = family_maximal(f, family, |r| rho.eval(r))?;
    Ok(OperatorResult {
        field,
        meta: OperatorMeta {
            operator: "M_rho".into(),
            kernel: Some(rho.label()),
            family: Some(FamilySummary::of(family)),
            diagnostics: vec![],
        },
    })
}

/// `I_ρ f(x) = ∫ ρ(|x−y|)/|x−y|ⁿ f(y) dy`: a direct cell sum over `|x − y| ≥ h` plus the
/// core `f(x)·σₙ·∫₀^h ρ(t)/t dt` with `f` frozen on the core.
pub fn frac_integral(f: &SampledField, rho: &KernelFunction) -> Result<OperatorResult, OperatorError> {
    let check = check_int_rho(rho);
    if !check.finite {
        return Err(OperatorError::IntegralCondition(format!(
            "int_0^1 rho(t)/t dt diverges for {}",
            rho.label()
        )));
    }
    let g = f.grid;
    let side = g.side;
    let h = g.h;
    let sigma = if g.dim == 1 { 2.0 } else { 2.0 * std::f64::consts::PI };
    let core_int = integral_to_zero(|s| rho.eval_ln(s), h).value_or_inf();
    let core = sigma * core_int;
    let cell = g.cell_volume();
    let values = if g.dim == 1 {
        let kern: Vec<f64> = (0..side)
            .map(|d| if d == 0 { 0.0 } else { let t = d as f64 * h; cell * rho.eval(t) / t })
            .collect();
        let support: Vec<usize> = (0..side).filter(|&i| f.values[i] != 0.0).collect();
        par::map_range(side, |i| {
            let far: f64 = support
                .iter()
                .map(|&j| kern[i.abs_diff(j)] * f.values[j])
                .sum();
            far + core * f.values[i]
        })
    } else {
        let kern: Vec<f64> = (0..side * side)
            .map(|k| {
                let (di, dj) = (k / side, k % side);
                if di == 0 && dj == 0 {
                    0.0
                } else {
                    let t = ((di * di + dj * dj) as f64).sqrt() * h;
                    cell * rho.eval(t) / (t * t)
                }
            })
            .collect();
        let support: Vec<usize> = (0..side * side).filter(|&k| f.values[k] != 0.0).collect();
        par::map_range(side * side, |k| {
            let (i, j) = (k / side, k % side);
            let far: f64 = support
                .iter()
                .map(|&q| {
                    let (a, b) = (q / side, q % side);
                    kern[i.abs_diff(a) * side + j.abs_diff(b)] * f.values[q]
                })
                .sum();
            far + core * f.values[k]
        })
    };
    Ok(OperatorResult {
        field: SampledField { grid: g, values },
        meta: OperatorMeta {
            operator: "I_rho".into(),
            kernel: Some(rho.label()),
            family: None,
            diagnostics: vec![format!("core integral over (0, h): {core_int}"), format!(
                "int_0^1 rho(t)/t dt = {}",
                check.value
            )],
        },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FarSupport {
    pub max_on_ball: f64,
    /// `Φ⁻¹(φ(r))·‖f‖` without the constant.
    pub scale: f64,
}

impl FarSupport {
    pub fn ratio(&self) -> f64 {
        crate::ext::ratio(self.max_on_ball, self.scale).unwrap_or(0.0)
    }

    pub fn ok(&self, c: f64) -> bool {
        self.max_on_ball <= c * self.scale * (1.0 + 1e-12)
    }
}

/// `max_B Mf` against `Φ⁻¹(φ(r))·‖f‖` for `f` vanishing on `2B`; `norm` is the global
/// (strong or weak) norm of `f`, computed by the caller.
pub fn far_support_bound(
    f: &SampledField,
    maximal: &SampledField,
    phi: &YoungFunction,
    phi_r: f64,
    ball: &Ball,
    norm: f64,
) -> Result<FarSupport, OperatorError> {
    let double = Ball { center: ball.center, radius: 2.0 * ball.radius };
    if BallSample::new(f, &double).values.iter().any(|&v| v != 0.0) {
        return Err(OperatorError::Support("f does not vanish on 2B".into()));
    }
    let max_on_ball = BallSample::new(maximal, ball).values.iter().fold(0.0, |m: f64, &v| m.max(v));
    Ok(FarSupport { max_on_ball, scale: phi.inverse(phi_r) * norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields_norms::ball_mean;
    use approx::assert_relative_eq;

    fn chi(g: Grid, r: f64) -> SampledField {
        SampledField::from_fn(g, |x| if x[0].abs() <= r { 1.0 } else { 0.0 })
    }

    /// Oracle: maximum over every family ball containing the point, by direct means.
    fn brute_maximal(f: &SampledField, fam: &BallFamily) -> Vec<f64> {
        let g = f.grid;
        let mut out = vec![f64::NEG_INFINITY; g.len()];
        for k in 0..fam.len() {
            let b = fam.ball(k);
            let mean = ball_mean(&f.abs(), &b);
            let shape = BallShape::new(g.dim, g.h, b.radius);
            let m = shape.m as i64;
            if g.dim == 1 {
                for d in -m..=m {
                    let i = b.center[0] as i64 + d;
                    if (0..g.side as i64).contains(&i) {
                        out[i as usize] = out[i as usize].max(mean);
                    }
                }
            } else {
                for (row, &w) in shape.widths.iter().enumerate() {
                    let i = b.center[0] as i64 + row as i64 - m;
                    for j in b.center[1] as i64 - w as i64..=b.center[1] as i64 + w as i64 {
                        if (0..g.side as i64).contains(&i) && (0..g.side as i64).contains(&j) {
                            let k = i as usize * g.side + j as usize;
                            out[k] = out[k].max(mean);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn sliding_max_matches_naive() {
        let row = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        let mut out = [0.0; 8];
        sliding_max(&row, 2, &mut out);
        for i in 0..8usize {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(7);
            let want = row[lo..=hi].iter().cloned().fold(f64::MIN, f64::max);
            assert_eq!(out[i], want);
        }
    }

    #[test]
    fn maximal_matches_brute_force_1d() {
        let g = Grid::new(1, 1.0, 0.05).unwrap();
        let f = SampledField::from_fn(g, |x| (x[0] * 3.0).sin().abs() * (x[0] < 0.4) as u8 as f64);
        let fam = BallFamily::new(&g, BallFamily::lattice_centers(&g, 3), vec![0.05, 0.12, 0.3, 0.7]).unwrap();
        let fast = hl_maximal(&f, &fam).unwrap().field.values;
        let slow = brute_maximal(&f, &fam);
        for (a, b) in fast.iter().zip(&slow) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn maximal_matches_brute_force_2d() {
        let g = Grid::new(2, 1.0, 0.1).unwrap();
        let f = SampledField::from_fn(g, |x| (x[0] + 2.0 * x[1]).cos().abs() * (x[1] > -0.3) as u8 as f64);
        let fam = BallFamily::standard(&g, 0.1, 2f64.sqrt()).unwrap();
        let fast = hl_maximal(&f, &fam).unwrap().field.values;
        let slow = brute_maximal(&f, &fam);
        for (a, b) in fast.iter().zip(&slow) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12, epsilon = 1e-14);
        }
    }

    #[test]
    fn maximal_of_constant_and_domination() {
        let g = Grid::new(1, 2.0, 0.02).unwrap();
        let fam = BallFamily::half_octave(&g);
        let c = SampledField::from_fn(g, |_| 2.5);
        let mc = hl_maximal(&c, &fam).unwrap().field;
        assert!(mc.values.iter().all(|&v| (v - 2.5).abs() < 1e-12));
        let f = SampledField::from_fn(g, |x| (1.0 - x[0] * x[0]).max(0.0));
        let mf = hl_maximal(&f, &fam).unwrap().field;
        assert!(mf.values.iter().zip(&f.values).all(|(m, v)| *m >= *v - 1e-15));
    }

    #[test]
    fn coverage_failure() {
        let g = Grid::new(1, 1.0, 0.1).unwrap();
        let fam = BallFamily::new(&g, vec![g.origin()], vec![0.3]).unwrap();
        let f = SampledField::zeros(g);
        assert_eq!(hl_maximal(&f, &fam).unwrap_err(), OperatorError::Coverage(16));
    }

    #[test]
    fn maximal_of_interval_near_profile() {
        // with fine radii the discrete optimum approaches 2/(x+1)
        let g = Grid::new(1, 6.0, 0.01).unwrap();
        let f = chi(g, 1.0);
        let fam = BallFamily::standard(&g, g.h, 2f64.powf(1.0 / 16.0)).unwrap();
        let mf = hl_maximal(&f, &fam).unwrap().field;
        for x in [1.5, 2.0, 3.0, 5.0] {
            let v = mf.values[g.axis_index(x)];
            assert!((v / (2.0 / (x + 1.0)) - 1.0).abs() < 0.03, "x={x}: {v}");
        }
    }

    #[test]
    fn frac_maximal_with_unit_kernel_is_m() {
        let g = Grid::new(1, 2.0, 0.02).unwrap();
        let fam = BallFamily::half_octave(&g);
        let f = chi(g, 0.7);
        let m = hl_maximal(&f, &fam).unwrap().field;
        let mr = frac_maximal(&f, &KernelFunction::constant(1.0), &fam).unwrap().field;
        assert_eq!(m.values, mr.values);
        let z = frac_maximal(&SampledField::zeros(g), &KernelFunction::power(0.5), &fam).unwrap();
        assert!(z.field.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn frac_integral_oracle() {
        // ρ(t) = t in 1D: the kernel is 1, so I_ρχ_{[-1,1]}(0) = 2
        let g = Grid::new(1, 2.0, 0.01).unwrap();
        let f = SampledField::from_fn(g, |x| if x[0].abs() < 1.0 { 1.0 } else { 0.0 });
        let out = frac_integral(&f, &KernelFunction::power(1.0)).unwrap().field;
        assert_relative_eq!(out.values[g.origin()[0]], 2.0, max_relative = 1e-12);
        let z = frac_integral(&SampledField::zeros(g), &KernelFunction::power(0.5)).unwrap();
        assert!(z.field.values.iter().all(|&v| v == 0.0));
        assert!(matches!(
            frac_integral(&f, &KernelFunction::constant(1e-3)),
            Err(OperatorError::IntegralCondition(_))
        ));
    }

    #[test]
    fn frac_integral_riesz_closed_form() {
        // I_α χ_{(-1,1)}(0) with ρ = t^α, n = 1: 2∫₀¹ t^{α-1} dt = 2/α
        let alpha = 0.5;
        let g = Grid::new(1, 2.0, 0.0025).unwrap();
        let f = SampledField::from_fn(g, |x| if x[0].abs() < 1.0 { 1.0 } else { 0.0 });
        let out = frac_integral(&f, &KernelFunction::power(alpha)).unwrap().field;
        assert_relative_eq!(out.values[g.origin()[0]], 2.0 / alpha, max_relative = 0.02);
    }

    #[test]
    fn far_support_rejects_overlap() {
        let g = Grid::new(1, 4.0, 0.05).unwrap();
        let f = SampledField::from_fn(g, |x| if (3.0..=4.0).contains(&x[0].abs()) { 1.0 } else { 0.0 });
        let fam = BallFamily::half_octave(&g);
        let mf = hl_maximal(&f, &fam).unwrap().field;
        let phi = YoungFunction::Power { p: 2.0 };
        let b = Ball::centered(&g, 1.0).unwrap();
        let fs = far_support_bound(&f, &mf, &phi, 1.0, &b, 1.0).unwrap();
        assert!(fs.max_on_ball > 0.0);
        let big = Ball::centered(&g, 2.0).unwrap();
        assert!(far_support_bound(&f, &mf, &phi, 1.0, &big, 1.0).is_err());
    }
}
