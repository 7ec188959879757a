//! Sampled fields on uniform grids in ℝ or ℝ², balls and ball families on the lattice,
//! distribution functions, and the strong (Luxemburg) and weak Orlicz-Morrey ball norms.
//!
//! Grid points sit at `x_i = (i − N)h`, `i = 0..=2N`, `Nh = L`, so the origin is a point.
//! A ball `B(a, r)` centred at a grid point holds the points `a + dh` with `|d|h < r`;
//! points outside the window count as zeros. Integrals are cell sums with weight `hⁿ`;
//! normalizations use the continuum volume `|B|`.

use serde::Serialize;

use crate::par;
use crate::weights_kernels::WeightFunction;
use crate::young_calc::YoungFunction;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FieldError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("field shape mismatch: expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("ball rejected: {0}")]
    Ball(String),
    #[error("ball family rejected: {0}")]
    Family(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid {
    pub dim: usize,
    pub half_width: f64,
    pub h: f64,
    /// Points per axis, `2N + 1`.
    pub side: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, h: f64) -> Result<Self, FieldError> {
        if dim != 1 && dim != 2 {
            return Err(FieldError::Grid(format!("dimension must be 1 or 2, got {dim}")));
        }
        if !(h > 0.0 && half_width > 0.0 && half_width.is_finite()) {
            return Err(FieldError::Grid(format!("need L > 0 and h > 0, got L={half_width}, h={h}")));
        }
        let ratio = half_width / h;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-9 * n {
            return Err(FieldError::Grid(format!("L/h must be a positive integer, got {ratio}")));
        }
        Ok(Grid { dim, half_width, h, side: 2 * n as usize + 1 })
    }

    fn half_index(&self) -> usize {
        (self.side - 1) / 2
    }

    pub fn len(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.half_index() as f64) * self.h
    }

    /// Index on one axis of the grid point nearest to `x` (clamped to the window).
    pub fn axis_index(&self, x: f64) -> usize {
        let k = (x / self.h).round() + self.half_index() as f64;
        k.clamp(0.0, (self.side - 1) as f64) as usize
    }

    pub fn origin(&self) -> [usize; 2] {
        let c = self.half_index();
        if self.dim == 1 {
            [c, 0]
        } else {
            [c, c]
        }
    }

    /// Physical coordinates of a flat index.
    pub fn point(&self, k: usize) -> [f64; 2] {
        if self.dim == 1 {
            [self.coord(k), 0.0]
        } else {
            [self.coord(k / self.side), self.coord(k % self.side)]
        }
    }

    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// `|B(0, r)|`: `2r` or `πr²`.
    pub fn ball_volume(&self, r: f64) -> f64 {
        if self.dim == 1 {
            2.0 * r
        } else {
            std::f64::consts::PI * r * r
        }
    }

    /// Same window, spacing halved.
    pub fn refined(&self) -> Grid {
        Grid::new(self.dim, self.half_width, self.h / 2.0).expect("halving keeps L/h integral")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampledField {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl SampledField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::Shape { expected: grid.len(), got: values.len() });
        }
        Ok(SampledField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        SampledField { grid, values: vec![0.0; grid.len()] }
    }

    pub fn from_fn<F: Fn([f64; 2]) -> f64>(grid: Grid, f: F) -> Self {
        let values = (0..grid.len()).map(|k| f(grid.point(k))).collect();
        SampledField { grid, values }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        SampledField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &SampledField, f: F) -> Self {
        assert_eq!(self.grid, other.grid, "fields on different grids");
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        SampledField { grid: self.grid, values }
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ |f|` as a cell sum.
    pub fn integral_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.grid.cell_volume()
    }

    pub fn at(&self, idx: [usize; 2]) -> f64 {
        if self.grid.dim == 1 {
            self.values[idx[0]]
        } else {
            self.values[idx[0] * self.grid.side + idx[1]]
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ball {
    /// Grid index of the centre; the second entry is unused in 1D.
    pub center: [usize; 2],
    pub radius: f64,
}

impl Ball {
    pub fn new(grid: &Grid, center: [usize; 2], radius: f64) -> Result<Self, FieldError> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FieldError::Ball(format!("radius must be positive, got {radius}")));
        }
        if radius < grid.h * (1.0 - 1e-12) {
            return Err(FieldError::Ball(format!(
                "radius {radius} below the resolution h = {}",
                grid.h
            )));
        }
        if center[0] >= grid.side || (grid.dim == 2 && center[1] >= grid.side) {
            return Err(FieldError::Ball("centre outside the grid".into()));
        }
        Ok(Ball { center, radius })
    }

    pub fn centered(grid: &Grid, radius: f64) -> Result<Self, FieldError> {
        Ball::new(grid, grid.origin(), radius)
    }

    pub fn center_coords(&self, grid: &Grid) -> [f64; 2] {
        [grid.coord(self.center[0]), if grid.dim == 2 { grid.coord(self.center[1]) } else { 0.0 }]
    }
}

/// Lattice offsets of a ball of radius `r`: the half-width of each row, indexed by the
/// row offset `di ∈ [-m, m]`. In 1D there is a single row.
#[derive(Clone, Debug, PartialEq)]
pub struct BallShape {
    pub m: usize,
    pub widths: Vec<usize>,
}

impl BallShape {
    pub fn new(dim: usize, h: f64, r: f64) -> Self {
        let q = r / h;
        // |d| < q with a guard against r = kh arriving as kh(1 + ε)
        let m = ((q - 1e-9).ceil() as i64 - 1).max(0) as usize;
        if dim == 1 {
            return BallShape { m, widths: vec![m] };
        }
        let q2 = q * q - 1e-9;
        let widths = (0..=2 * m)
            .map(|k| {
                let di = k as f64 - m as f64;
                let rem = q2 - di * di;
                if rem <= 0.0 {
                    return 0;
                }
                let mut w = rem.sqrt().floor() as i64;
                while w > 0 && (w * w) as f64 >= rem {
                    w -= 1;
                }
                w.max(0) as usize
            })
            .collect();
        BallShape { m, widths }
    }

    /// Number of lattice points, inside or outside the window.
    pub fn count(&self) -> usize {
        self.widths.iter().map(|w| 2 * w + 1).sum()
    }
}

/// Values at the lattice points of a ball, zeros outside the window included.
#[derive(Clone, Debug, PartialEq)]
pub struct BallSample {
    pub values: Vec<f64>,
    pub volume: f64,
    pub cell: f64,
}

impl BallSample {
    pub fn new(f: &SampledField, ball: &Ball) -> Self {
        let mut s = BallSample::signed(f, ball);
        s.values.iter_mut().for_each(|v| *v = v.abs());
        s
    }

    /// Raw values, signs kept.
    pub fn signed(f: &SampledField, ball: &Ball) -> Self {
        let g = &f.grid;
        let shape = BallShape::new(g.dim, g.h, ball.radius);
        let mut values = Vec::with_capacity(shape.count());
        let side = g.side as i64;
        let m = shape.m as i64;
        if g.dim == 1 {
            let c = ball.center[0] as i64;
            for d in -m..=m {
                let i = c + d;
                values.push(if (0..side).contains(&i) { f.values[i as usize] } else { 0.0 });
            }
        } else {
            let (ci, cj) = (ball.center[0] as i64, ball.center[1] as i64);
            for (k, &w) in shape.widths.iter().enumerate() {
                let i = ci + k as i64 - m;
                let w = w as i64;
                for j in cj - w..=cj + w {
                    let inside = (0..side).contains(&i) && (0..side).contains(&j);
                    values.push(if inside { f.values[(i * side + j) as usize] } else { 0.0 });
                }
            }
        }
        BallSample { values, volume: g.ball_volume(ball.radius), cell: g.cell_volume() }
    }

    /// Distinct positive levels in decreasing order with `hⁿ·#{|f| ≥ level}`.
    pub fn levels(&self) -> Vec<(f64, f64)> {
        level_counts(&self.values, self.cell)
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell
    }
}

/// Distinct positive values `v` in decreasing order paired with `cell·#{x ≥ v}`.
pub fn level_counts(values: &[f64], cell: f64) -> Vec<(f64, f64)> {
    let mut v: Vec<f64> = values.iter().copied().filter(|&x| x > 0.0).collect();
    v.sort_by(|a, b| b.partial_cmp(a).expect("no NaN in fields"));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (k, x) in v.iter().enumerate() {
        match out.last_mut() {
            Some(last) if last.0 == *x => last.1 = (k + 1) as f64 * cell,
            _ => out.push((*x, (k + 1) as f64 * cell)),
        }
    }
    out
}

/// `m(G, f, t) = |{x ∈ G : |f(x)| > t}|`, with `G` a ball or the whole window.
pub fn distribution(f: &SampledField, region: Option<&Ball>, t: f64) -> f64 {
    let cell = f.grid.cell_volume();
    match region {
        None => f.values.iter().filter(|v| v.abs() > t).count() as f64 * cell,
        Some(b) => BallSample::new(f, b).values.iter().filter(|&&v| v > t).count() as f64 * cell,
    }
}

/// Lattice average of `f` over the ball.
pub fn ball_mean(f: &SampledField, ball: &Ball) -> f64 {
    let s = BallSample::signed(f, ball);
    s.values.iter().sum::<f64>() / s.values.len() as f64
}

/// `(1/|B|) ∫_B |f|` with the continuum volume.
pub fn ball_average(f: &SampledField, ball: &Ball) -> f64 {
    let s = BallSample::new(f, ball);
    s.integral() / s.volume
}

const NORM_REL_TOL: f64 = 1e-8;
const BRACKET_LIMIT: f64 = 1e30;

/// `inf{λ > 0 : ok(λ)}` for a predicate monotone in `λ`, bracketing from `scale`.
fn monotone_inf<F: Fn(f64) -> bool>(ok: F, scale: f64) -> f64 {
    let (mut lo, mut hi);
    if ok(scale) {
        hi = scale;
        lo = scale / 2.0;
        while ok(lo) {
            hi = lo;
            lo /= 2.0;
            if lo < 1e-300 {
                return 0.0;
            }
        }
    } else {
        lo = scale;
        hi = 2.0 * scale;
        while !ok(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > BRACKET_LIMIT * scale {
                return f64::INFINITY;
            }
        }
    }
    while hi / lo - 1.0 > NORM_REL_TOL {
        let mid = (lo * hi).sqrt();
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(1/(|B|φ(r))) ∫_B Φ(|f|/λ)`.
pub fn strong_modular(sample: &BallSample, phi: &YoungFunction, phi_r: f64, lambda: f64) -> f64 {
    let mut acc = 0.0;
    for &v in &sample.values {
        if v > 0.0 {
            acc += phi.eval(v / lambda);
            if acc.is_infinite() {
                return f64::INFINITY;
            }
        }
    }
    acc * sample.cell / (sample.volume * phi_r)
}

/// `sup_t Φ(t) m(B, f/λ, t) / (|B|φ(r))` over the exact candidate set.
pub fn weak_modular(levels: &[(f64, f64)], volume: f64, phi: &YoungFunction, phi_r: f64, lambda: f64) -> f64 {
    levels
        .iter()
        .map(|&(v, c)| crate::ext::mul0(phi.eval(v / lambda), c))
        .fold(0.0, f64::max)
        / (volume * phi_r)
}

/// `‖f‖_{Φ,φ,B}` from a prepared sample.
pub fn strong_norm_sample(sample: &BallSample, phi: &YoungFunction, phi_r: f64) -> f64 {
    let vmax = sample.values.iter().fold(0.0f64, |m, &v| m.max(v));
    if vmax == 0.0 {
        return 0.0;
    }
    if let Some((c, p)) = phi.homogeneity() {
        let s: f64 = sample.values.iter().map(|v| v.powf(p)).sum::<f64>() * sample.cell;
        return (c * s / (sample.volume * phi_r)).powf(1.0 / p);
    }
    monotone_inf(|l| strong_modular(sample, phi, phi_r, l) <= 1.0, vmax)
}

/// `‖f‖_{Φ,φ,B,weak}` from a prepared sample.
pub fn weak_norm_sample(sample: &BallSample, phi: &YoungFunction, phi_r: f64) -> f64 {
    let levels = sample.levels();
    if levels.is_empty() {
        return 0.0;
    }
    if let Some((c, p)) = phi.homogeneity() {
        return levels
            .iter()
            .map(|&(v, cnt)| v * (c * cnt / (sample.volume * phi_r)).powf(1.0 / p))
            .fold(0.0, f64::max);
    }
    let vmax = levels[0].0;
    monotone_inf(|l| weak_modular(&levels, sample.volume, phi, phi_r, l) <= 1.0, vmax)
}

pub fn luxemburg_norm(f: &SampledField, phi: &YoungFunction, w: &WeightFunction, ball: &Ball) -> f64 {
    strong_norm_sample(&BallSample::new(f, ball), phi, w.eval(ball.radius))
}

pub fn weak_norm(f: &SampledField, phi: &YoungFunction, w: &WeightFunction, ball: &Ball) -> f64 {
    weak_norm_sample(&BallSample::new(f, ball), phi, w.eval(ball.radius))
}

pub fn ball_norm(f: &SampledField, phi: &YoungFunction, w: &WeightFunction, ball: &Ball, weak: bool) -> f64 {
    if weak {
        weak_norm(f, phi, w, ball)
    } else {
        luxemburg_norm(f, phi, w, ball)
    }
}

/// Whole-window Orlicz (Luxemburg) norm `inf{λ : ∫ Φ(|f|/λ) ≤ 1}`.
pub fn orlicz_norm(f: &SampledField, phi: &YoungFunction) -> f64 {
    let vmax = f.sup_abs();
    if vmax == 0.0 {
        return 0.0;
    }
    let cell = f.grid.cell_volume();
    let modular = |l: f64| f.values.iter().map(|v| phi.eval(v.abs() / l)).sum::<f64>() * cell;
    if let Some((c, p)) = phi.homogeneity() {
        let s: f64 = f.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * cell;
        return (c * s).powf(1.0 / p);
    }
    monotone_inf(|l| modular(l) <= 1.0, vmax)
}

/// Centres × radii over which global sups are discretized.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BallFamily {
    pub centers: Vec<[usize; 2]>,
    pub radii: Vec<f64>,
}

impl BallFamily {
    pub fn new(grid: &Grid, centers: Vec<[usize; 2]>, radii: Vec<f64>) -> Result<Self, FieldError> {
        if centers.is_empty() || radii.is_empty() {
            return Err(FieldError::Family("family must be nonempty".into()));
        }
        for &r in &radii {
            Ball::new(grid, centers[0], r).map_err(|e| FieldError::Family(e.to_string()))?;
            if r > 2.0 * grid.half_width * (1.0 + 1e-12) {
                return Err(FieldError::Family(format!("radius {r} exceeds 2L")));
            }
        }
        for &c in &centers {
            Ball::new(grid, c, radii[0]).map_err(|e| FieldError::Family(e.to_string()))?;
        }
        Ok(BallFamily { centers, radii })
    }

    /// `r₀κʲ`, `j = 0..=J`.
    pub fn geometric_radii(r0: f64, kappa: f64, j_max: usize) -> Result<Vec<f64>, FieldError> {
        if !(r0 > 0.0 && kappa > 1.0) {
            return Err(FieldError::Family(format!("need r0 > 0 and kappa > 1, got {r0}, {kappa}")));
        }
        Ok((0..=j_max).map(|j| r0 * kappa.powi(j as i32)).collect())
    }

    /// Every `stride`-th grid point on each axis (always including the origin).
    pub fn lattice_centers(grid: &Grid, stride: usize) -> Vec<[usize; 2]> {
        let stride = stride.max(1);
        let c = grid.origin()[0];
        let axis: Vec<usize> = (0..grid.side).filter(|i| (*i as i64 - c as i64) % stride as i64 == 0).collect();
        if grid.dim == 1 {
            axis.iter().map(|&i| [i, 0]).collect()
        } else {
            axis.iter().flat_map(|&i| axis.iter().map(move |&j| [i, j])).collect()
        }
    }

    /// All grid centres with radii `r₀κʲ ≤ 2L`.
    pub fn standard(grid: &Grid, r0: f64, kappa: f64) -> Result<Self, FieldError> {
        let top = 2.0 * grid.half_width * (1.0 + 1e-12);
        let j_max = ((top / r0).ln() / kappa.ln()).floor().max(0.0) as usize;
        let radii = BallFamily::geometric_radii(r0, kappa, j_max)?;
        BallFamily::new(grid, BallFamily::lattice_centers(grid, 1), radii)
    }

    /// The default operator family: all centres, radii `h·2^{k/2}` up to `2L`.
    pub fn half_octave(grid: &Grid) -> Self {
        BallFamily::standard(grid, grid.h, 2f64.sqrt()).expect("grid radii are valid")
    }

    pub fn len(&self) -> usize {
        self.centers.len() * self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn ball(&self, k: usize) -> Ball {
        let (ri, ci) = (k / self.centers.len(), k % self.centers.len());
        Ball { center: self.centers[ci], radius: self.radii[ri] }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlobalNorm {
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub value: f64,
    pub argmax: Option<Ball>,
    pub balls: usize,
    pub skipped: usize,
}

/// `sup_{B ∈ F} ‖f‖_{Φ,φ,B}` (or the weak norm). Balls whose norm is not a number are
/// skipped and counted.
pub fn global_norm(
    f: &SampledField,
    phi: &YoungFunction,
    w: &WeightFunction,
    family: &BallFamily,
    weak: bool,
) -> GlobalNorm {
    let vals = par::map_range(family.len(), |k| {
        let b = family.ball(k);
        ball_norm(f, phi, w, &b, weak)
    });
    let mut best: Option<(usize, f64)> = None;
    let mut skipped = 0;
    for (k, &v) in vals.iter().enumerate() {
        if v.is_nan() {
            skipped += 1;
            continue;
        }
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((k, v));
        }
    }
    GlobalNorm {
        value: best.map_or(0.0, |(_, v)| v),
        argmax: best.map(|(k, _)| family.ball(k)),
        balls: family.len(),
        skipped,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// `(1/(|B|φ(r))) ∫_B |fg|` against `‖f‖_{Φ,φ,B} ‖g‖_{Φ̃,φ,B}`; ok when `lhs ≤ 2·rhs`.
pub fn holder_pairing(
    f: &SampledField,
    g: &SampledField,
    phi: &YoungFunction,
    phi_tilde: &YoungFunction,
    w: &WeightFunction,
    ball: &Ball,
) -> HolderReport {
    let fg = f.zip_with(g, |a, b| a * b);
    let s = BallSample::new(&fg, ball);
    let phi_r = w.eval(ball.radius);
    let lhs = s.integral() / (s.volume * phi_r);
    let rhs = luxemburg_norm(f, phi, w, ball) * luxemburg_norm(g, phi_tilde, w, ball);
    let rhs = if rhs.is_nan() { 0.0 } else { rhs };
    HolderReport { lhs, rhs, ok: lhs <= 2.0 * rhs * (1.0 + 1e-6) }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakTypeIdentity {
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub s1: f64,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub s2: f64,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub s3: f64,
    pub ok: bool,
}

fn agree(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

/// The three sups `Φ(t)m(f,t)`, `t·m(f,Φ⁻¹(t))` and `t·m(Φ(|f|),t)` on a ball.
///
/// The second is evaluated just below each `Φ(v_k)`, with real calls to `Φ⁻¹`, since the
/// distribution function of `f` is right-continuous and the sup is approached from the left.
pub fn weak_type_identity(f: &SampledField, phi: &YoungFunction, ball: &Ball) -> WeakTypeIdentity {
    let sample = BallSample::new(f, ball);
    let levels = sample.levels();
    let s1 = levels.iter().map(|&(v, c)| crate::ext::mul0(phi.eval(v), c)).fold(0.0, f64::max);
    let dist = |t: f64| sample.values.iter().filter(|&&v| v > t).count() as f64 * sample.cell;
    let mut s2 = 0.0f64;
    for &(v, _) in &levels {
        let w = phi.eval(v);
        if w == 0.0 {
            continue;
        }
        if w.is_infinite() {
            if phi.inverse(f64::MAX) < v && dist(phi.inverse(f64::MAX)) > 0.0 {
                s2 = f64::INFINITY;
            }
            continue;
        }
        let t = w * (1.0 - 2f64.powi(-40));
        s2 = s2.max(t * dist(phi.inverse(t)));
    }
    let transformed: Vec<f64> = sample.values.iter().map(|&v| phi.eval(v)).collect();
    let s3 = level_counts(&transformed, sample.cell)
        .iter()
        .map(|&(w, c)| crate::ext::mul0(w, c))
        .fold(0.0, f64::max);
    let ok = agree(s1, s2) && agree(s2, s3) && agree(s1, s3);
    WeakTypeIdentity { s1, s2, s3, ok }
}
