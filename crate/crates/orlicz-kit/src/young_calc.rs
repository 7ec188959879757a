//! Young functions on `[0, ∞]`: evaluation, thresholds, the generalized inverse,
//! complementary functions, and sampled class checks (Δ₂, ∇₂, 𝒴 classes, equivalence).

use serde::Serialize;

use crate::ext::{mul0, ratio, ExtReal};
use crate::grids::{almost_increasing_constant, geometric, relative_change, LogGrid};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum YoungError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("tabulated Young function rejected: {0}")]
    Table(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Piecewise-linear Young function through `(t_k, v_k)`; `v` may end in `∞`.
///
/// Between a finite knot and an infinite one the function is `∞` (left-continuous jump).
/// Past the last knot it continues with the last slope when that value is finite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table {
    pub t: Vec<f64>,
    #[serde(serialize_with = "crate::ext::serialize_vec_f64")]
    pub v: Vec<f64>,
}

impl Table {
    pub fn new(mut t: Vec<f64>, mut v: Vec<f64>) -> Result<Self, YoungError> {
        if t.len() != v.len() || t.is_empty() {
            return Err(YoungError::Table("column lengths differ or table empty".into()));
        }
        if t[0] != 0.0 {
            t.insert(0, 0.0);
            v.insert(0, 0.0);
        }
        if v[0] != 0.0 {
            return Err(YoungError::Table("value at t=0 must be 0".into()));
        }
        for k in 1..t.len() {
            if !(t[k] > t[k - 1]) || !t[k].is_finite() {
                return Err(YoungError::Table(format!("t not strictly increasing at row {k}")));
            }
            if v[k].is_nan() || v[k] < v[k - 1] {
                return Err(YoungError::Table(format!("values not increasing at row {k}")));
            }
        }
        let last = t.len() - 1;
        if v[last].is_finite() && (last == 0 || v[last] <= v[last - 1]) {
            return Err(YoungError::Table(
                "table must end with a positive slope or with inf".into(),
            ));
        }
        Ok(Table { t, v })
    }

    fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return f64::INFINITY;
        }
        let k = self.t.partition_point(|&tk| tk < x);
        let last = self.t.len() - 1;
        if k > last {
            if self.v[last].is_infinite() {
                return f64::INFINITY;
            }
            let slope = (self.v[last] - self.v[last - 1]) / (self.t[last] - self.t[last - 1]);
            return self.v[last] + slope * (x - self.t[last]);
        }
        if self.t[k] == x {
            return self.v[k];
        }
        if self.v[k].is_infinite() {
            return f64::INFINITY;
        }
        let (t0, t1, v0, v1) = (self.t[k - 1], self.t[k], self.v[k - 1], self.v[k]);
        v0 + (v1 - v0) * (x - t0) / (t1 - t0)
    }

    fn thresholds(&self) -> (f64, f64) {
        let a = self
            .t
            .iter()
            .zip(&self.v)
            .take_while(|(_, &v)| v == 0.0)
            .map(|(&t, _)| t)
            .last()
            .unwrap_or(0.0);
        let b = match self.v.iter().position(|v| v.is_infinite()) {
            Some(k) => self.t[k - 1],
            None => f64::INFINITY,
        };
        (a, b)
    }

    fn inverse(&self, u: f64) -> f64 {
        let k = self.v.partition_point(|&vk| vk <= u);
        let last = self.t.len() - 1;
        if k > last {
            let slope = (self.v[last] - self.v[last - 1]) / (self.t[last] - self.t[last - 1]);
            return self.t[last] + (u - self.v[last]) / slope;
        }
        if self.v[k].is_infinite() {
            return self.t[k - 1];
        }
        let (t0, t1, v0, v1) = (self.t[k - 1], self.t[k], self.v[k - 1], self.v[k]);
        t0 + (u - v0) * (t1 - t0) / (v1 - v0)
    }
}

/// The Young-function catalog plus the closed-form complements it generates.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum YoungFunction {
    /// `t^p`, `p ≥ 1`.
    Power { p: f64 },
    /// `t^p / p`, `p ≥ 1`.
    PowerOverP { p: f64 },
    /// `c·t^p`.
    ScaledPower { c: f64, p: f64 },
    /// `t` on `[0,1]`, `∞` beyond.
    CappedLinear,
    /// `max(0, t² − 4)`.
    ShiftedSquare,
    /// `e^{1−1/t^p}` on `[0,1]`, `e^{t^p−1}` beyond; not convex near 1.
    ExpPower { p: f64 },
    /// `0` on `[0,b]`, `∞` beyond.
    Indicator { b: f64 },
    /// `max(0, t − a)`.
    Hinge { a: f64 },
    /// Complement of `max(0, t² − 4)`: `2t` up to 4, then `t²/4 + 4`.
    ShiftedSquareDual,
    /// `base + Θ` with `Θ(t) = max(0, (t − δb)/(b − t))` below `b` and `∞` from `b` on.
    PlusBlowup { base: Box<YoungFunction>, delta: f64, b: f64 },
    /// Numerical complement `sup_u {tu − Φ(u)}`.
    Conjugate { inner: Box<YoungFunction> },
    Tabulated { table: Table },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum YClass {
    Y1,
    Y2,
    Y3,
}

impl YoungFunction {
    pub fn power(p: f64) -> Result<Self, YoungError> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(YoungError::Parameter(format!("power needs p >= 1, got {p}")));
        }
        Ok(YoungFunction::Power { p })
    }

    pub fn power_over_p(p: f64) -> Result<Self, YoungError> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(YoungError::Parameter(format!("power_over_p needs p >= 1, got {p}")));
        }
        Ok(YoungFunction::PowerOverP { p })
    }

    pub fn exp_power(p: f64) -> Result<Self, YoungError> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(YoungError::Parameter(format!("exp_power needs p > 0, got {p}")));
        }
        Ok(YoungFunction::ExpPower { p })
    }

    pub fn tabulated(t: Vec<f64>, v: Vec<f64>) -> Result<Self, YoungError> {
        Ok(YoungFunction::Tabulated { table: Table::new(t, v)? })
    }

    /// The seven-member reference catalog.
    pub fn catalog() -> Vec<YoungFunction> {
        vec![
            YoungFunction::Power { p: 2.0 },
            YoungFunction::Power { p: 1.0 },
            YoungFunction::PowerOverP { p: 2.0 },
            YoungFunction::PowerOverP { p: 3.0 },
            YoungFunction::CappedLinear,
            YoungFunction::ShiftedSquare,
            YoungFunction::ExpPower { p: 1.0 },
        ]
    }

    /// Short identifier used in reports.
    pub fn label(&self) -> String {
        match self {
            YoungFunction::Power { p } => format!("power(p={p})"),
            YoungFunction::PowerOverP { p } => format!("power_over_p(p={p})"),
            YoungFunction::ScaledPower { c, p } => format!("scaled_power(c={c},p={p})"),
            YoungFunction::CappedLinear => "capped_linear".into(),
            YoungFunction::ShiftedSquare => "shifted_square".into(),
            YoungFunction::ExpPower { p } => format!("exp_power(p={p})"),
            YoungFunction::Indicator { b } => format!("indicator(b={b})"),
            YoungFunction::Hinge { a } => format!("hinge(a={a})"),
            YoungFunction::ShiftedSquareDual => "shifted_square_dual".into(),
            YoungFunction::PlusBlowup { base, delta, .. } => {
                format!("majorant({},delta={delta})", base.label())
            }
            YoungFunction::Conjugate { inner } => format!("conjugate({})", inner.label()),
            YoungFunction::Tabulated { table } => format!("tabulated({} knots)", table.t.len()),
        }
    }

    /// `Φ(t)` for `t ∈ [0, ∞]`.
    pub fn eval(&self, t: f64) -> f64 {
        debug_assert!(t >= 0.0, "Young functions live on [0, inf]");
        if t <= 0.0 {
            return 0.0;
        }
        if t.is_infinite() {
            return f64::INFINITY;
        }
        match self {
            YoungFunction::Power { p } => t.powf(*p),
            YoungFunction::PowerOverP { p } => t.powf(*p) / p,
            YoungFunction::ScaledPower { c, p } => c * t.powf(*p),
            YoungFunction::CappedLinear => {
                if t <= 1.0 {
                    t
                } else {
                    f64::INFINITY
                }
            }
            YoungFunction::ShiftedSquare => (t * t - 4.0).max(0.0),
            YoungFunction::ExpPower { p } => {
                if t <= 1.0 {
                    (1.0 - t.powf(-p)).exp()
                } else {
                    (t.powf(*p) - 1.0).exp()
                }
            }
            YoungFunction::Indicator { b } => {
                if t <= *b {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            YoungFunction::Hinge { a } => (t - a).max(0.0),
            YoungFunction::ShiftedSquareDual => {
                if t <= 4.0 {
                    2.0 * t
                } else {
                    t * t / 4.0 + 4.0
                }
            }
            YoungFunction::PlusBlowup { base, delta, b } => {
                if t >= *b {
                    f64::INFINITY
                } else {
                    base.eval(t) + ((t - delta * b) / (b - t)).max(0.0)
                }
            }
            YoungFunction::Conjugate { inner } => conjugate_eval(inner, t),
            YoungFunction::Tabulated { table } => table.eval(t),
        }
    }

    pub fn eval_ext(&self, t: ExtReal) -> ExtReal {
        ExtReal::new(self.eval(t.value()))
    }

    /// `(a(Φ), b(Φ))`.
    pub fn thresholds(&self) -> (f64, f64) {
        let inf = f64::INFINITY;
        match self {
            YoungFunction::Power { .. }
            | YoungFunction::PowerOverP { .. }
            | YoungFunction::ScaledPower { .. }
            | YoungFunction::ExpPower { .. }
            | YoungFunction::ShiftedSquareDual => (0.0, inf),
            YoungFunction::CappedLinear => (0.0, 1.0),
            YoungFunction::ShiftedSquare => (2.0, inf),
            YoungFunction::Indicator { b } => (*b, *b),
            YoungFunction::Hinge { a } => (*a, inf),
            YoungFunction::PlusBlowup { base, delta, b } => {
                let (a0, b0) = base.thresholds();
                (a0.min(delta * b), b0.min(*b))
            }
            YoungFunction::Conjugate { .. } => scan_thresholds(self),
            YoungFunction::Tabulated { table } => table.thresholds(),
        }
    }

    /// Generalized inverse `Φ⁻¹(u) = inf{t ≥ 0 : Φ(t) > u}`, with `Φ⁻¹(∞) = ∞`.
    pub fn inverse(&self, u: f64) -> f64 {
        if u.is_infinite() {
            return f64::INFINITY;
        }
        let u = u.max(0.0);
        match self {
            YoungFunction::Power { p } => u.powf(1.0 / p),
            YoungFunction::PowerOverP { p } => (p * u).powf(1.0 / p),
            YoungFunction::ScaledPower { c, p } => (u / c).powf(1.0 / p),
            YoungFunction::CappedLinear => u.min(1.0),
            YoungFunction::ShiftedSquare => (u + 4.0).sqrt(),
            YoungFunction::ExpPower { p } => {
                if u == 0.0 {
                    0.0
                } else if u <= 1.0 {
                    (1.0 - u.ln()).powf(-1.0 / p)
                } else {
                    (1.0 + u.ln()).powf(1.0 / p)
                }
            }
            YoungFunction::Indicator { b } => *b,
            YoungFunction::Hinge { a } => a + u,
            YoungFunction::ShiftedSquareDual => {
                if u <= 8.0 {
                    u / 2.0
                } else {
                    2.0 * (u - 4.0).sqrt()
                }
            }
            YoungFunction::Tabulated { table } => table.inverse(u),
            YoungFunction::PlusBlowup { .. } | YoungFunction::Conjugate { .. } => {
                bisect_inverse(self, u)
            }
        }
    }

    pub fn inverse_ext(&self, u: ExtReal) -> ExtReal {
        ExtReal::new(self.inverse(u.value()))
    }

    /// `Φ⁻¹(e^{ln_u})` without forming `e^{ln_u}` where a closed form allows it.
    pub fn inverse_ln(&self, ln_u: f64) -> f64 {
        if ln_u == f64::NEG_INFINITY {
            return self.inverse(0.0);
        }
        match self {
            YoungFunction::Power { p } => (ln_u / p).exp(),
            YoungFunction::PowerOverP { p } => ((p.ln() + ln_u) / p).exp(),
            YoungFunction::ScaledPower { c, p } => ((ln_u - c.ln()) / p).exp(),
            YoungFunction::ExpPower { p } => {
                if ln_u <= 0.0 {
                    (1.0 - ln_u).powf(-1.0 / p)
                } else {
                    (1.0 + ln_u).powf(1.0 / p)
                }
            }
            _ => self.inverse(ln_u.exp()),
        }
    }

    /// `ln Φ(t)`, without underflow for the exponential family.
    pub fn ln_eval(&self, t: f64) -> f64 {
        match self {
            YoungFunction::Power { p } => p * t.ln(),
            YoungFunction::ExpPower { p } if t > 0.0 && t <= 1.0 => 1.0 - t.powf(-p),
            _ => self.eval(t).ln(),
        }
    }

    /// `ln Φ⁻¹(e^{ln_u})`, kept in the log domain for the power families.
    pub fn ln_inverse_ln(&self, ln_u: f64) -> f64 {
        match self {
            YoungFunction::Power { p } => ln_u / p,
            YoungFunction::PowerOverP { p } => (p.ln() + ln_u) / p,
            YoungFunction::ScaledPower { c, p } => (ln_u - c.ln()) / p,
            _ => self.inverse_ln(ln_u).ln(),
        }
    }

    /// `Some((c, p))` when `Φ(t) = c·t^p`, which lets norms be solved in closed form.
    pub fn homogeneity(&self) -> Option<(f64, f64)> {
        match self {
            YoungFunction::Power { p } => Some((1.0, *p)),
            YoungFunction::PowerOverP { p } => Some((1.0 / p, *p)),
            YoungFunction::ScaledPower { c, p } => Some((*c, *p)),
            _ => None,
        }
    }

    /// The complementary function `Φ̃(t) = sup_u {tu − Φ(u)}`; closed forms where known.
    pub fn complementary(&self) -> YoungFunction {
        match self {
            YoungFunction::Power { p } => scaled_power_conjugate(1.0, *p),
            YoungFunction::PowerOverP { p } => {
                if *p == 1.0 {
                    YoungFunction::Indicator { b: 1.0 }
                } else {
                    YoungFunction::PowerOverP { p: p / (p - 1.0) }
                }
            }
            YoungFunction::ScaledPower { c, p } => scaled_power_conjugate(*c, *p),
            YoungFunction::CappedLinear => YoungFunction::Hinge { a: 1.0 },
            YoungFunction::Hinge { a } if *a == 1.0 => YoungFunction::CappedLinear,
            YoungFunction::Indicator { b } => YoungFunction::ScaledPower { c: *b, p: 1.0 },
            YoungFunction::ShiftedSquare => YoungFunction::ShiftedSquareDual,
            YoungFunction::ShiftedSquareDual => YoungFunction::ShiftedSquare,
            other => YoungFunction::Conjugate { inner: Box::new(other.clone()) },
        }
    }

    /// Class by the value at `b(Φ)`, which is the left limit there.
    pub fn classify(&self) -> YClass {
        let (_, b) = self.thresholds();
        if b.is_infinite() {
            YClass::Y1
        } else if self.eval(b).is_infinite() {
            YClass::Y2
        } else {
            YClass::Y3
        }
    }
}

fn scaled_power_conjugate(c: f64, p: f64) -> YoungFunction {
    if p == 1.0 {
        return YoungFunction::Indicator { b: c };
    }
    let q = p / (p - 1.0);
    YoungFunction::ScaledPower { c: (p - 1.0) * c * (c * p).powf(-q), p: q }
}

/// Monotone bisection for `inf{t : Φ(t) > u}`; returns the last point with `Φ ≤ u`.
fn bisect_inverse(phi: &YoungFunction, u: f64) -> f64 {
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    while phi.eval(hi) <= u {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return f64::INFINITY;
        }
    }
    if lo == 0.0 {
        // shrink toward zero to get a relative bracket
        let mut h = hi;
        while h > 1e-300 && phi.eval(h / 2.0) > u {
            h /= 2.0;
        }
        if h <= 1e-300 {
            return 0.0;
        }
        lo = h / 2.0;
        hi = h;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi.eval(mid) > u {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Thresholds by monotone search, for numerically defined members.
fn scan_thresholds(phi: &YoungFunction) -> (f64, f64) {
    let zero = |t: f64| phi.eval(t) == 0.0;
    let a = if !zero(1e-300) {
        0.0
    } else {
        let (mut lo, mut hi) = (1e-300f64, 1.0f64);
        while zero(hi) {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return (f64::INFINITY, f64::INFINITY);
            }
        }
        for _ in 0..200 {
            let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
            if zero(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    let inf = |t: f64| phi.eval(t).is_infinite();
    let b = if !inf(1e300) {
        f64::INFINITY
    } else {
        let (mut lo, mut hi) = (a.max(1e-300), 1e300f64);
        if inf(lo) {
            return (a, a);
        }
        for _ in 0..400 {
            let mid = if hi / lo > 4.0 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
            if inf(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    };
    (a, b)
}

/// `sup_u {tu − Φ(u)}` by a log-grid scan with bracket expansion, refined by golden section.
fn conjugate_eval(inner: &YoungFunction, t: f64) -> f64 {
    let (_, b) = inner.thresholds();
    let obj = |u: f64| {
        let v = inner.eval(u);
        if v.is_infinite() {
            f64::NEG_INFINITY
        } else {
            t * u - v
        }
    };
    let per_decade = 20.0;
    let mut us: Vec<f64> = vec![0.0];
    let top = if b.is_finite() { b } else { 1e12 };
    let lo = 1e-12f64.min(top / 10.0);
    let decades = (top / lo).log10();
    let n = (decades * per_decade).ceil().max(1.0) as usize;
    for i in 0..=n {
        us.push(lo * 10f64.powf(decades * i as f64 / n as f64));
    }
    let mut vals: Vec<f64> = us.iter().map(|&u| obj(u)).collect();
    let mut best = argmax(&vals);
    if b.is_infinite() {
        // expand while the maximum sits at the right edge
        while best == us.len() - 1 {
            let last = *us.last().unwrap();
            if last > 1e300 {
                return f64::INFINITY;
            }
            for i in 1..=per_decade as usize {
                let u = last * 10f64.powf(i as f64 / per_decade);
                us.push(u);
                vals.push(obj(u));
            }
            best = argmax(&vals);
        }
    }
    let mut value = vals[best];
    let l = us[best.saturating_sub(1)];
    let r = us[(best + 1).min(us.len() - 1)];
    if r > l {
        value = value.max(golden_max(&obj, l, r));
    }
    value.max(0.0)
}

fn argmax(v: &[f64]) -> usize {
    let mut k = 0;
    for i in 1..v.len() {
        if v[i] > v[k] {
            k = i;
        }
    }
    k
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..120 {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if (b - a).abs() <= 1e-15 * b.abs().max(1e-300) {
            break;
        }
    }
    fc.max(fd)
}

/// Checks the four catalog definitions against the closed-form complements: the
/// numerical conjugate of `Φ` evaluated at `t`. Exposed for oracle tests.
pub fn numerical_conjugate(phi: &YoungFunction, t: f64) -> f64 {
    conjugate_eval(phi, t)
}

/// `Ψ = Φ + Θ ∈ 𝒴⁽²⁾` with `Ψ(δt) ≤ Φ(t) ≤ Ψ(t)`, for `Φ ∈ 𝒴⁽³⁾` and `δ ∈ (0,1)`.
pub fn y3_to_y2_majorant(phi: &YoungFunction, delta: f64) -> Result<YoungFunction, YoungError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(YoungError::Parameter(format!("delta must lie in (0,1), got {delta}")));
    }
    if phi.classify() != YClass::Y3 {
        return Err(YoungError::Precondition(format!("{} is not in class Y3", phi.label())));
    }
    let (_, b) = phi.thresholds();
    Ok(YoungFunction::PlusBlowup { base: Box::new(phi.clone()), delta, b })
}

/// Greatest convex minorant through `(0,0)` and the finite samples `(t_k, Φ(t_k))`.
/// If `Φ` becomes infinite inside the knot range the table ends with `∞` there.
pub fn convex_minorant(phi: &YoungFunction, knots: &[f64]) -> Result<YoungFunction, YoungError> {
    let mut pts: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    let mut cut = None;
    for &t in knots.iter().filter(|&&t| t > 0.0) {
        let v = phi.eval(t);
        if v.is_finite() {
            pts.push((t, v));
        } else {
            cut = Some(t);
            break;
        }
    }
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // drop the middle point if it lies on or above the chord
            if (y2 - y1) * (p.0 - x1) >= (p.1 - y1) * (x2 - x1) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let (mut t, mut v): (Vec<f64>, Vec<f64>) = hull.into_iter().unzip();
    if let Some(c) = cut {
        t.push(c);
        v.push(f64::INFINITY);
    }
    YoungFunction::tabulated(t, v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Delta2Report {
    pub holds: bool,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub constant: f64,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub constant_extended: f64,
}

fn delta2_constant(phi: &YoungFunction, grid: &LogGrid) -> f64 {
    grid.values()
        .into_iter()
        .filter_map(|t| ratio(phi.eval(2.0 * t), phi.eval(t)))
        .fold(0.0, f64::max)
}

/// `sup Φ(2t)/Φ(t)` over the grid; holds if finite and stable under grid extension.
pub fn check_delta2(phi: &YoungFunction, grid: &LogGrid) -> Delta2Report {
    let c = delta2_constant(phi, grid);
    let ce = delta2_constant(phi, &grid.extended());
    Delta2Report {
        holds: c.is_finite() && relative_change(c, ce) < 0.01,
        constant: c,
        constant_extended: ce,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Nabla2Report {
    pub holds: bool,
    pub witness_k: Option<f64>,
}

/// Default `k` grid for ∇₂: `2^{j/4}`, `j = 1..40`.
pub fn default_k_grid() -> Vec<f64> {
    geometric(2.0, 4, 1, 40)
}

fn nabla2_witness(phi: &YoungFunction, ts: &[f64], k_grid: &[f64]) -> Option<f64> {
    k_grid.iter().copied().find(|&k| {
        ts.iter().all(|&t| {
            let lhs = phi.eval(t);
            let rhs = phi.eval(k * t) / (2.0 * k);
            rhs.is_infinite() || lhs <= rhs * (1.0 + 1e-12)
        })
    })
}

/// Smallest `k` with `Φ(t) ≤ Φ(kt)/(2k)` on the grid; holds if the same `k` works on the
/// extended grid.
pub fn check_nabla2(phi: &YoungFunction, grid: &LogGrid, k_grid: &[f64]) -> Nabla2Report {
    let w = nabla2_witness(phi, &grid.values(), k_grid);
    let we = nabla2_witness(phi, &grid.extended().values(), k_grid);
    Nabla2Report { holds: w.is_some() && w == we, witness_k: w }
}

/// The almost-increasing form of ∇₂: the smallest `p` in `p_grid` for which
/// `Φ(t)/t^p` is almost increasing on the grid with a grid-stable constant.
pub fn check_almost_increasing_quotient(
    phi: &YoungFunction,
    grid: &LogGrid,
    p_grid: &[f64],
) -> Option<f64> {
    let quotient_constant = |g: &LogGrid, p: f64| {
        let vals: Vec<f64> = g.values().iter().map(|&t| phi.eval(t) / t.powf(p)).collect();
        almost_increasing_constant(&vals)
    };
    p_grid.iter().copied().find(|&p| {
        let c = quotient_constant(grid, p);
        let ce = quotient_constant(&grid.extended(), p);
        c.is_finite() && relative_change(c, ce) < 0.01
    })
}

/// Default `p` grid for the quotient test; exponents stay at least 1.05 so that
/// `t^{1-p}` drifts visibly across sixteen decades.
pub fn default_p_grid() -> Vec<f64> {
    vec![1.05, 1.1, 1.2, 1.5, 2.0, 3.0]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivReport {
    pub equiv: bool,
    pub witness_c: Option<f64>,
}

fn equiv_witness(phi: &YoungFunction, psi: &YoungFunction, ts: &[f64], c_grid: &[f64]) -> Option<f64> {
    let tol = 1.0 + 1e-12;
    c_grid.iter().copied().find(|&c| {
        ts.iter().all(|&t| {
            let lower = phi.eval(t / c);
            let mid = psi.eval(t);
            let upper = phi.eval(c * t);
            let ok_low = mid.is_infinite() || lower <= mid * tol;
            let ok_up = upper.is_infinite() || mid <= upper * tol;
            ok_low && ok_up
        })
    })
}

/// Smallest `C` in `c_grid` with `Φ(t/C) ≤ Ψ(t) ≤ Φ(Ct)` on the grid (and its extension).
pub fn approx_equiv(
    phi: &YoungFunction,
    psi: &YoungFunction,
    c_grid: &[f64],
    grid: &LogGrid,
) -> EquivReport {
    let w = equiv_witness(phi, psi, &grid.values(), c_grid);
    let we = equiv_witness(phi, psi, &grid.extended().values(), c_grid);
    EquivReport { equiv: w.is_some() && w == we, witness_c: w }
}

/// `Φ(Φ⁻¹(u)) ≤ u ≤ Φ⁻¹(Φ(u))` at one point; returns the two relative excesses.
pub fn sandwich_excess(phi: &YoungFunction, u: f64) -> (f64, f64) {
    let left = phi.eval(phi.inverse(u));
    let right = phi.inverse_ln(phi.ln_eval(u));
    let ex_left = if left <= u { 0.0 } else { (left - u) / u.max(f64::MIN_POSITIVE) };
    let ex_right = if u <= right { 0.0 } else { (u - right) / u };
    (ex_left, ex_right)
}

/// `Φ⁻¹(t)·Φ̃⁻¹(t) / t`, which lies in `[1, 2]` for a complementary pair.
pub fn pair_product_ratio(phi: &YoungFunction, phi_tilde: &YoungFunction, t: f64) -> f64 {
    mul0(phi.inverse(t), phi_tilde.inverse(t)) / t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eval_examples() {
        assert_eq!(YoungFunction::ShiftedSquare.eval(3.0), 5.0);
        assert!(YoungFunction::CappedLinear.eval(2.0).is_infinite());
        assert_eq!(YoungFunction::Power { p: 2.0 }.eval(0.0), 0.0);
        for phi in YoungFunction::catalog() {
            assert!(phi.eval(f64::INFINITY).is_infinite());
        }
    }

    /// Brute-force oracle for thresholds: scan a fine grid.
    fn scan_oracle(phi: &YoungFunction) -> (f64, f64) {
        let ts: Vec<f64> = (1..=40_000).map(|i| i as f64 * 1e-4).collect();
        let a = ts.iter().copied().filter(|&t| phi.eval(t) == 0.0).fold(0.0, f64::max);
        let b = ts.iter().copied().find(|&t| phi.eval(t).is_infinite()).unwrap_or(f64::INFINITY);
        (a, b)
    }

    #[test]
    fn thresholds_match_scan() {
        let (a, b) = scan_oracle(&YoungFunction::CappedLinear);
        assert_eq!(a, 0.0);
        assert!((b - 1.0).abs() <= 1e-4 + 1e-12);
        assert_eq!(YoungFunction::CappedLinear.thresholds(), (0.0, 1.0));
        let (a, _) = scan_oracle(&YoungFunction::ShiftedSquare);
        assert!((a - 2.0).abs() < 1e-9);
        assert_eq!(YoungFunction::ShiftedSquare.thresholds(), (2.0, f64::INFINITY));
        assert_eq!(YoungFunction::Power { p: 3.0 }.thresholds(), (0.0, f64::INFINITY));
    }

    /// Oracle for the generalized inverse: smallest grid point with Φ(t) > u.
    fn inverse_oracle(phi: &YoungFunction, u: f64, step: f64) -> f64 {
        (0..).map(|i| i as f64 * step).find(|&t| phi.eval(t) > u).unwrap()
    }

    #[test]
    fn inverse_examples_against_brute_force() {
        let step = 1e-5;
        let cl = YoungFunction::CappedLinear;
        assert!((cl.inverse(0.5) - 0.5).abs() < 1e-12);
        assert!((inverse_oracle(&cl, 0.5, step) - 0.5).abs() <= step + 1e-12);
        assert_eq!(cl.inverse(7.0), 1.0);
        assert!((inverse_oracle(&cl, 7.0, step) - 1.0).abs() <= step + 1e-12);
        let ss = YoungFunction::ShiftedSquare;
        assert_eq!(ss.inverse(5.0), 3.0);
        assert!(ss.eval(3.0 - 1e-9) <= 5.0 && ss.eval(3.0 + 1e-9) > 5.0);
        assert!((YoungFunction::Power { p: 4.0 }.inverse(16.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complementary_closed_forms() {
        assert_eq!(
            YoungFunction::PowerOverP { p: 2.0 }.complementary(),
            YoungFunction::PowerOverP { p: 2.0 }
        );
        assert_eq!(
            YoungFunction::PowerOverP { p: 3.0 }.complementary(),
            YoungFunction::PowerOverP { p: 1.5 }
        );
        let lin = YoungFunction::Power { p: 1.0 }.complementary();
        assert_eq!(lin.eval(1.0), 0.0);
        assert_eq!(lin.eval(0.3), 0.0);
        assert!(lin.eval(1.0 + 1e-9).is_infinite());
    }

    #[test]
    fn closed_form_complements_match_numerical_supremum() {
        // oracle: direct sup over a dense u grid
        let sup = |phi: &YoungFunction, t: f64| {
            (0..200_000)
                .map(|i| i as f64 * 1e-4)
                .map(|u| t * u - phi.eval(u))
                .filter(|v| v.is_finite())
                .fold(0.0, f64::max)
        };
        for phi in [
            YoungFunction::Power { p: 2.0 },
            YoungFunction::PowerOverP { p: 3.0 },
            YoungFunction::ShiftedSquare,
            YoungFunction::CappedLinear,
        ] {
            let tilde = phi.complementary();
            for t in [0.3, 1.0, 2.5, 6.0] {
                let oracle = sup(&phi, t);
                assert_relative_eq!(tilde.eval(t), oracle, max_relative = 1e-6, epsilon = 1e-7);
                assert_relative_eq!(
                    numerical_conjugate(&phi, t),
                    oracle,
                    max_relative = 1e-6,
                    epsilon = 1e-7
                );
            }
        }
    }

    #[test]
    fn classes() {
        assert_eq!(YoungFunction::Power { p: 2.0 }.classify(), YClass::Y1);
        assert_eq!(YoungFunction::CappedLinear.classify(), YClass::Y3);
        // the complement of t jumps from 0 to ∞ at 1: left limit 0, so Y3
        assert_eq!(YoungFunction::Power { p: 1.0 }.complementary().classify(), YClass::Y3);
    }

    #[test]
    fn majorant_sandwich() {
        let phi = YoungFunction::CappedLinear;
        for delta in [0.9, 0.5] {
            let psi = y3_to_y2_majorant(&phi, delta).unwrap();
            assert_eq!(psi.classify(), YClass::Y2);
            assert_eq!(psi.thresholds().1, 1.0);
            for t in LogGrid::new(1e-4, 1e2, 300).values() {
                assert!(psi.eval(delta * t) <= phi.eval(t));
                assert!(phi.eval(t) <= psi.eval(t));
            }
        }
        assert!(y3_to_y2_majorant(&YoungFunction::Power { p: 2.0 }, 0.5).is_err());
        assert!(y3_to_y2_majorant(&phi, 1.0).is_err());
    }

    #[test]
    fn delta2_examples() {
        let g = LogGrid::default_t();
        let r = check_delta2(&YoungFunction::Power { p: 2.0 }, &g);
        assert!(r.holds);
        assert_relative_eq!(r.constant, 4.0, max_relative = 1e-12);
        let r = check_delta2(&YoungFunction::CappedLinear, &g);
        assert!(!r.holds && r.constant.is_infinite());
        assert!(!check_delta2(&YoungFunction::ExpPower { p: 1.0 }, &g).holds);
    }

    #[test]
    fn nabla2_examples() {
        let g = LogGrid::default_t();
        let r = check_nabla2(&YoungFunction::Power { p: 2.0 }, &g, &[4.0]);
        assert_eq!(r.witness_k, Some(4.0));
        assert!(r.holds);
        assert!(!check_nabla2(&YoungFunction::Power { p: 1.0 }, &g, &default_k_grid()).holds);
        assert!(check_nabla2(&YoungFunction::ShiftedSquare, &g, &default_k_grid()).holds);
    }

    #[test]
    fn nabla2_agrees_with_quotient_test_on_catalog() {
        let g = LogGrid::default_t();
        for phi in YoungFunction::catalog() {
            let a = check_nabla2(&phi, &g, &default_k_grid()).holds;
            let b = check_almost_increasing_quotient(&phi, &g, &default_p_grid()).is_some();
            assert_eq!(a, b, "{}", phi.label());
        }
    }

    #[test]
    fn equivalence_examples() {
        let g = LogGrid::default_t();
        let c_grid = geometric(2.0, 4, 0, 40);
        let p2 = YoungFunction::Power { p: 2.0 };
        let r = approx_equiv(&p2, &p2, &c_grid, &g);
        assert_eq!(r.witness_c, Some(1.0));
        assert!(!approx_equiv(&p2, &YoungFunction::Power { p: 3.0 }, &c_grid, &g).equiv);
    }

    #[test]
    fn exp_power_is_equivalent_to_its_convex_minorant() {
        let phi = YoungFunction::ExpPower { p: 1.0 };
        let mut knots = LogGrid::new(1e-3, 800.0, 4000).values();
        knots.insert(0, 0.0);
        let hull = convex_minorant(&phi, &knots).unwrap();
        let c_grid = geometric(2.0, 4, 0, 40);
        let r = approx_equiv(&phi, &hull, &c_grid, &LogGrid::default_t());
        assert!(r.equiv, "{r:?}");
        assert!(r.witness_c.unwrap() > 1.0);
    }

    #[test]
    fn tabulated_inverse_breaks_ties_low() {
        let phi = YoungFunction::tabulated(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 0.0, 1.0, 3.0]).unwrap();
        assert_eq!(phi.thresholds(), (1.0, f64::INFINITY));
        assert_eq!(phi.inverse(0.0), 1.0);
        assert_eq!(phi.inverse(1.0), 2.0);
        assert_eq!(phi.inverse(2.0), 2.5);
        assert!(YoungFunction::tabulated(vec![0.0, 1.0, 0.5], vec![0.0, 1.0, 2.0]).is_err());
        assert!(YoungFunction::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 2.0, 1.0]).is_err());
    }

    #[test]
    fn tabulated_with_infinite_tail_is_y3() {
        let phi = YoungFunction::tabulated(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, f64::INFINITY]).unwrap();
        assert_eq!(phi.thresholds(), (0.0, 1.0));
        assert_eq!(phi.classify(), YClass::Y3);
        assert_eq!(phi.inverse(5.0), 1.0);
    }
}
