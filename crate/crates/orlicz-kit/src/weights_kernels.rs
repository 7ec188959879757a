//! Weights `φ` and kernels `ρ` on `(0, ∞)`, their class checks (𝒢^dec, doubling,
//! integrability at 0, the sup-ρ window condition), `ρ̃`, and strict regularization.
//!
//! Everything is evaluated through `ln θ(e^s)` so that checks over many decades never
//! underflow: the Bessel-type kernel at `r = 10⁶` is `e^{-5·10⁵}`.

use serde::Serialize;

use crate::grids::{relative_change, LogGrid};
use crate::quad::{integral_log, integral_to_zero, simpson, Improper, REL_TOL};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum RadialError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("table rejected: {0}")]
    Table(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// Log-log interpolation table for a positive function; linear extrapolation in
/// `(ln r, ln θ)` with the end slopes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogTable {
    pub ln_r: Vec<f64>,
    pub ln_v: Vec<f64>,
}

impl LogTable {
    pub fn from_samples(r: &[f64], v: &[f64]) -> Result<Self, RadialError> {
        if r.len() != v.len() || r.len() < 2 {
            return Err(RadialError::Table("need at least two rows of equal length".into()));
        }
        for k in 0..r.len() {
            if !(r[k] > 0.0 && r[k].is_finite() && v[k] > 0.0 && v[k].is_finite()) {
                return Err(RadialError::Table(format!("row {k}: radius and value must be positive")));
            }
            if k > 0 && r[k] <= r[k - 1] {
                return Err(RadialError::Table(format!("row {k}: radii not strictly increasing")));
            }
        }
        Ok(LogTable {
            ln_r: r.iter().map(|x| x.ln()).collect(),
            ln_v: v.iter().map(|x| x.ln()).collect(),
        })
    }

    pub fn ln_at(&self, s: f64) -> f64 {
        let n = self.ln_r.len();
        let k = self.ln_r.partition_point(|&x| x < s).clamp(1, n - 1);
        let (x0, x1, y0, y1) = (self.ln_r[k - 1], self.ln_r[k], self.ln_v[k - 1], self.ln_v[k]);
        y0 + (y1 - y0) * (s - x0) / (x1 - x0)
    }
}

/// `ln θ(e^s)` for any positive radial function.
pub trait Radial {
    fn ln_at(&self, s: f64) -> f64;

    fn at(&self, r: f64) -> f64 {
        self.ln_at(r.ln()).exp()
    }
}

impl<F: Fn(f64) -> f64> Radial for F {
    fn ln_at(&self, s: f64) -> f64 {
        self(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum WeightFunction {
    Power { lambda: f64 },
    /// `r^λ (1 + |ln r|)^μ`.
    PowerWithLog { lambda: f64, mu: f64 },
    Constant { c: f64 },
    ReciprocalPowerN { n: u32 },
    Scaled { c: f64, inner: Box<WeightFunction> },
    Tabulated { table: LogTable },
}

impl WeightFunction {
    pub fn constant(c: f64) -> Result<Self, RadialError> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(RadialError::Parameter(format!("constant weight needs c > 0, got {c}")));
        }
        Ok(WeightFunction::Constant { c })
    }

    pub fn scaled(self, c: f64) -> Self {
        WeightFunction::Scaled { c, inner: Box::new(self) }
    }

    pub fn label(&self) -> String {
        match self {
            WeightFunction::Power { lambda } => format!("power(lambda={lambda})"),
            WeightFunction::PowerWithLog { lambda, mu } => {
                format!("power_with_log(lambda={lambda},mu={mu})")
            }
            WeightFunction::Constant { c } => format!("constant(c={c})"),
            WeightFunction::ReciprocalPowerN { n } => format!("reciprocal_power_n(n={n})"),
            WeightFunction::Scaled { c, inner } => format!("{c}*{}", inner.label()),
            WeightFunction::Tabulated { table } => format!("tabulated({} knots)", table.ln_r.len()),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            WeightFunction::Power { lambda } => r.powf(*lambda),
            WeightFunction::ReciprocalPowerN { n } => r.powi(-(*n as i32)),
            WeightFunction::Constant { c } => *c,
            WeightFunction::Scaled { c, inner } => c * inner.eval(r),
            _ => self.ln_at(r.ln()).exp(),
        }
    }

    /// `φ` at `e^s`.
    pub fn eval_ln(&self, s: f64) -> f64 {
        match self {
            WeightFunction::Constant { c } => *c,
            _ => self.ln_at(s).exp(),
        }
    }
}

impl Radial for WeightFunction {
    fn ln_at(&self, s: f64) -> f64 {
        match self {
            WeightFunction::Power { lambda } => lambda * s,
            WeightFunction::PowerWithLog { lambda, mu } => lambda * s + mu * (1.0 + s.abs()).ln(),
            WeightFunction::Constant { c } => c.ln(),
            WeightFunction::ReciprocalPowerN { n } => -(*n as f64) * s,
            WeightFunction::Scaled { c, inner } => c.ln() + inner.ln_at(s),
            WeightFunction::Tabulated { table } => table.ln_at(s),
        }
    }

    fn at(&self, r: f64) -> f64 {
        self.eval(r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum KernelFamily {
    Power { alpha: f64 },
    /// `(ln(1/t))^{-(α+1)}` for `t ≤ 1/e`, `(ln t)^{α-1}` for `t ≥ e`, `1` in between.
    LogKernel { alpha: f64 },
    /// `min(t^α, e^{-t/2})`.
    BesselType { alpha: f64 },
    Constant { c: f64 },
    Tabulated { table: LogTable },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelFunction {
    #[serde(flatten)]
    pub family: KernelFamily,
    pub k1: f64,
    pub k2: f64,
}

impl KernelFunction {
    pub fn new(family: KernelFamily) -> Self {
        KernelFunction { family, k1: 1.0, k2: 2.0 }
    }

    pub fn with_window(family: KernelFamily, k1: f64, k2: f64) -> Result<Self, RadialError> {
        if !(k1 > 0.0 && k2 > k1 && k2.is_finite()) {
            return Err(RadialError::Parameter(format!("need 0 < K1 < K2, got {k1}, {k2}")));
        }
        Ok(KernelFunction { family, k1, k2 })
    }

    pub fn power(alpha: f64) -> Self {
        KernelFunction::new(KernelFamily::Power { alpha })
    }

    pub fn log_kernel(alpha: f64) -> Self {
        KernelFunction::new(KernelFamily::LogKernel { alpha })
    }

    /// The window `[r/2, 2r]`: with `K₁ = 1` the exponential tail would make the
    /// sup-ρ ratio grow like `r`.
    pub fn bessel_type(alpha: f64) -> Self {
        KernelFunction { family: KernelFamily::BesselType { alpha }, k1: 0.5, k2: 2.0 }
    }

    pub fn constant(c: f64) -> Self {
        KernelFunction::new(KernelFamily::Constant { c })
    }

    pub fn label(&self) -> String {
        let fam = match &self.family {
            KernelFamily::Power { alpha } => format!("power(alpha={alpha})"),
            KernelFamily::LogKernel { alpha } => format!("log_kernel(alpha={alpha})"),
            KernelFamily::BesselType { alpha } => format!("bessel_type(alpha={alpha})"),
            KernelFamily::Constant { c } => format!("constant(c={c})"),
            KernelFamily::Tabulated { table } => format!("tabulated({} knots)", table.ln_r.len()),
        };
        format!("{fam}[K1={},K2={}]", self.k1, self.k2)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.family {
            KernelFamily::Power { alpha } => t.powf(*alpha),
            KernelFamily::Constant { c } => *c,
            KernelFamily::BesselType { alpha } => t.powf(*alpha).min((-t / 2.0).exp()),
            _ => self.ln_at(t.ln()).exp(),
        }
    }

    /// `ρ` at `e^s`.
    pub fn eval_ln(&self, s: f64) -> f64 {
        match &self.family {
            KernelFamily::Constant { c } => *c,
            _ => self.ln_at(s).exp(),
        }
    }
}

impl Radial for KernelFunction {
    fn ln_at(&self, s: f64) -> f64 {
        match &self.family {
            KernelFamily::Power { alpha } => alpha * s,
            KernelFamily::LogKernel { alpha } => {
                if s <= -1.0 {
                    -(alpha + 1.0) * (-s).ln()
                } else if s >= 1.0 {
                    (alpha - 1.0) * s.ln()
                } else {
                    0.0
                }
            }
            KernelFamily::BesselType { alpha } => (alpha * s).min(-0.5 * s.exp()),
            KernelFamily::Constant { c } => c.ln(),
            KernelFamily::Tabulated { table } => table.ln_at(s),
        }
    }

    fn at(&self, t: f64) -> f64 {
        self.eval(t)
    }
}

/// A sampled class constant with its grid-extension probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassReport {
    pub holds: bool,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub constant: f64,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub constant_extended: f64,
}

impl ClassReport {
    fn from_pair(c: f64, ce: f64) -> Self {
        ClassReport {
            holds: c.is_finite() && relative_change(c, ce) < 0.01,
            constant: c,
            constant_extended: ce,
        }
    }
}

/// `ln` of the almost-increasing constant of a sequence given by its logarithms.
fn ln_almost_increasing(ln_vals: &[f64]) -> f64 {
    let mut best = 0.0f64;
    let mut running = f64::NEG_INFINITY;
    for &v in ln_vals {
        if running > v {
            best = best.max(running - v);
        }
        running = running.max(v);
    }
    best
}

fn gdec_constant<R: Radial + ?Sized>(phi: &R, n: u32, grid: &LogGrid) -> f64 {
    let s: Vec<f64> = grid.values().iter().map(|r| r.ln()).collect();
    let ln_phi: Vec<f64> = s.iter().map(|&s| phi.ln_at(s)).collect();
    let rev: Vec<f64> = ln_phi.iter().rev().copied().collect();
    let dec = ln_almost_increasing(&rev);
    let scaled: Vec<f64> = ln_phi.iter().zip(&s).map(|(l, s)| l + n as f64 * s).collect();
    let inc = ln_almost_increasing(&scaled);
    dec.max(inc).exp()
}

/// 𝒢^dec membership: `φ` almost decreasing and `φ(r)rⁿ` almost increasing.
pub fn check_gdec<R: Radial + ?Sized>(phi: &R, n: u32, grid: &LogGrid) -> ClassReport {
    ClassReport::from_pair(gdec_constant(phi, n, grid), gdec_constant(phi, n, &grid.extended()))
}

fn doubling_constant<R: Radial + ?Sized>(theta: &R, grid: &LogGrid) -> f64 {
    let mut best = 0.0f64;
    for r in grid.values() {
        let s = r.ln();
        let here = theta.ln_at(s);
        for j in -8..=8 {
            let other = theta.ln_at(s + j as f64 / 8.0 * std::f64::consts::LN_2);
            best = best.max(here - other);
        }
    }
    best.exp()
}

/// `sup θ(r)/θ(s)` over `1/2 ≤ r/s ≤ 2`, sampled at eighth-octave offsets.
pub fn check_doubling<R: Radial + ?Sized>(theta: &R, grid: &LogGrid) -> ClassReport {
    ClassReport::from_pair(doubling_constant(theta, grid), doubling_constant(theta, &grid.extended()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntRhoReport {
    pub finite: bool,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub value: f64,
    pub diagnostic: Option<String>,
}

/// `∫₀¹ ρ(t)/t dt`.
pub fn check_int_rho(rho: &KernelFunction) -> IntRhoReport {
    match integral_to_zero(|s| rho.eval_ln(s), 1.0) {
        Improper::Finite(v) => IntRhoReport { finite: true, value: v, diagnostic: None },
        Improper::Divergent { partial, decades } => IntRhoReport {
            finite: false,
            value: f64::INFINITY,
            diagnostic: Some(format!(
                "tail still growing after {decades} decades of ln(1/t) (partial {partial})"
            )),
        },
    }
}

/// `ρ̃(r) = ∫_{K₁r}^{K₂r} ρ(t)/t dt`.
pub fn tilde_rho(rho: &KernelFunction, r: f64) -> f64 {
    integral_log(|s| rho.eval_ln(s), rho.k1 * r, rho.k2 * r)
}

/// `sup_{[r,2r]} ρ / ρ̃(r)` with both sides scaled by the sampled maximum.
fn sup_rho_ratio(rho: &KernelFunction, r: f64) -> f64 {
    let s = r.ln();
    let ln2 = std::f64::consts::LN_2;
    let top = (0..=32)
        .map(|i| rho.ln_at(s + ln2 * i as f64 / 32.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let scaled = simpson(
        &|u: f64| (rho.ln_at(u) - top).exp(),
        (rho.k1 * r).ln(),
        (rho.k2 * r).ln(),
        REL_TOL,
    );
    if scaled > 0.0 {
        1.0 / scaled
    } else {
        f64::INFINITY
    }
}

/// Grid sup of the window ratio, with the best grid point refined by golden section
/// between its neighbours so that an interior peak does not depend on grid density.
fn sup_rho_constant(rho: &KernelFunction, grid: &LogGrid) -> f64 {
    let rs = grid.values();
    let vals: Vec<f64> = rs.iter().map(|&r| sup_rho_ratio(rho, r)).collect();
    let k = (0..vals.len()).fold(0, |b, i| if vals[i] > vals[b] { i } else { b });
    if !vals[k].is_finite() {
        return vals[k];
    }
    let lo = rs[k.saturating_sub(1)].ln();
    let hi = rs[(k + 1).min(rs.len() - 1)].ln();
    let (mut a, mut b) = (lo, hi);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let f = |s: f64| sup_rho_ratio(rho, s.exp());
    let mut best = vals[k];
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        let (fc, fd) = (f(c), f(d));
        best = best.max(fc).max(fd);
        if fc >= fd {
            b = d;
        } else {
            a = c;
        }
    }
    best
}

pub fn check_sup_rho(rho: &KernelFunction, grid: &LogGrid) -> ClassReport {
    ClassReport::from_pair(sup_rho_constant(rho, grid), sup_rho_constant(rho, &grid.extended()))
}

/// Strictly decreasing equivalent of a 𝒢^dec weight, tabulated on `grid`.
///
/// Uses `m(r) = sup_{s ≥ r} φ(s)` tilted by `1 + τ` with `τ` falling linearly in the grid
/// index from 1 to 0; a weight already strictly decreasing on the grid is returned as is.
pub fn strictify(phi: &WeightFunction, n: u32, grid: &LogGrid) -> Result<WeightFunction, RadialError> {
    if !check_gdec(phi, n, grid).holds {
        return Err(RadialError::Precondition(format!("{} is not in G^dec", phi.label())));
    }
    let rs = grid.values();
    let s: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let ln_phi: Vec<f64> = s.iter().map(|&s| phi.ln_at(s)).collect();
    if ln_phi.windows(2).all(|w| w[1] < w[0]) {
        return Ok(phi.clone());
    }
    let len = ln_phi.len();
    let mut ln_m = ln_phi.clone();
    for i in (0..len - 1).rev() {
        ln_m[i] = ln_m[i].max(ln_m[i + 1]);
    }
    let ln_v: Vec<f64> = (0..len)
        .map(|i| ln_m[i] + (1.0 + (len - 1 - i) as f64 / (len - 1) as f64).ln())
        .collect();
    Ok(WeightFunction::Tabulated { table: LogTable { ln_r: s, ln_v } })
}

/// `Σ_{j=-J}^{-1} ρ̃(2ʲr)` against `∫_{K₁2^{-J}r}^{K₂r} ρ(t)/t dt`.
pub fn dyadic_lower_ratio(rho: &KernelFunction, r: f64, depth: i32) -> f64 {
    let sum: f64 = (-depth..=-1).map(|j| tilde_rho(rho, r * 2f64.powi(j))).sum();
    let whole = integral_log(|s| rho.eval_ln(s), rho.k1 * r * 2f64.powi(-depth), rho.k2 * r);
    sum / whole
}

/// `Σ_{j=0}^{J} ρ̃(2ʲr)τ(2ʲr)` against `∫_{K₁r}^{K₂2^J r} ρ(t)τ(t)/t dt`.
pub fn dyadic_upper_ratio<T: Radial + ?Sized>(rho: &KernelFunction, tau: &T, r: f64, depth: i32) -> f64 {
    let sum: f64 = (0..=depth)
        .map(|j| {
            let rj = r * 2f64.powi(j);
            tilde_rho(rho, rj) * tau.at(rj)
        })
        .sum();
    let whole = integral_log(
        |s| (rho.ln_at(s) + tau.ln_at(s)).exp(),
        rho.k1 * r,
        rho.k2 * r * 2f64.powi(depth),
    );
    sum / whole
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid() -> LogGrid {
        LogGrid::default_r()
    }

    #[test]
    fn gdec_examples() {
        let r = check_gdec(&WeightFunction::ReciprocalPowerN { n: 1 }, 1, &grid());
        assert!(r.holds);
        assert_relative_eq!(r.constant, 1.0, max_relative = 1e-12);
        let r = check_gdec(&WeightFunction::Constant { c: 1.0 }, 1, &grid());
        assert!(r.holds && r.constant == 1.0);
        assert!(!check_gdec(&WeightFunction::Power { lambda: -2.0 }, 1, &grid()).holds);
        // 2D: r^{-2} is the boundary member
        assert!(check_gdec(&WeightFunction::Power { lambda: -2.0 }, 2, &grid()).holds);
    }

    #[test]
    fn doubling_examples() {
        for lambda in [-1.0, 0.5, 2.0] {
            let r = check_doubling(&WeightFunction::Power { lambda }, &grid());
            assert!(r.holds);
            assert_relative_eq!(r.constant, 2f64.powf(lambda.abs()), max_relative = 1e-9);
        }
        let exp_decay = |s: f64| -s.exp();
        assert!(!check_doubling(&exp_decay, &grid()).holds);
    }

    #[test]
    fn bessel_type_is_not_doubling_on_the_default_range() {
        // e^{-r/2} over [r, 2r] loses e^{-r/2}: unbounded once r reaches the grid top
        let r = check_doubling(&KernelFunction::bessel_type(0.5), &grid());
        assert!(!r.holds);
        let small = LogGrid::new(1e-6, 1e-2, 100);
        let r = check_doubling(&KernelFunction::bessel_type(0.5), &small);
        assert!(r.holds);
    }

    #[test]
    fn int_rho_examples() {
        let r = check_int_rho(&KernelFunction::power(0.5));
        assert!(r.finite);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-9);
        let r = check_int_rho(&KernelFunction::constant(1.0));
        assert!(!r.finite && r.diagnostic.is_some());
        // 1 from [1/e, 1] plus ∫_1^∞ u^{-(α+1)} du = 1/α
        for alpha in [0.5, 1.0, 2.0] {
            let r = check_int_rho(&KernelFunction::log_kernel(alpha));
            assert!(r.finite);
            assert_relative_eq!(r.value, 1.0 + 1.0 / alpha, max_relative = 1e-7);
        }
    }

    #[test]
    fn tilde_rho_examples() {
        assert_relative_eq!(tilde_rho(&KernelFunction::power(1.0), 1.0), 1.0, max_relative = 1e-12);
        assert_relative_eq!(tilde_rho(&KernelFunction::power(2.0), 1.0), 1.5, max_relative = 1e-12);
        assert_relative_eq!(
            tilde_rho(&KernelFunction::constant(1.0), 37.0),
            2f64.ln(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn sup_rho_power_closed_form() {
        for alpha in [0.25, 0.5, 1.0] {
            let r = check_sup_rho(&KernelFunction::power(alpha), &grid());
            let want = 2f64.powf(alpha) * alpha / (2f64.powf(alpha) - 1.0);
            assert!(r.holds);
            assert_relative_eq!(r.constant, want, max_relative = 1e-8);
        }
    }

    #[test]
    fn sup_rho_other_kernels() {
        assert!(check_sup_rho(&KernelFunction::bessel_type(0.5), &grid()).holds);
        assert!(check_sup_rho(&KernelFunction::log_kernel(1.0), &grid()).holds);
    }

    #[test]
    fn strictify_examples() {
        let g = LogGrid::new(1e-3, 1e3, 61);
        let p = WeightFunction::Power { lambda: -0.5 };
        assert_eq!(strictify(&p, 1, &g).unwrap(), p);
        let c = WeightFunction::Constant { c: 1.0 };
        let s = strictify(&c, 1, &g).unwrap();
        let vals: Vec<f64> = g.values().iter().map(|&r| s.eval(r)).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        assert!(vals.iter().all(|&v| (1.0..=2.0 + 1e-12).contains(&v)));
        assert!(strictify(&WeightFunction::Power { lambda: -2.0 }, 1, &g).is_err());
    }

    #[test]
    fn strictify_step_table() {
        let g = LogGrid::new(1e-2, 1e2, 81);
        let r = [1e-2, 0.5, 1.0, 1e2];
        let v = [2.0, 2.0, 1.0, 1.0];
        let phi = WeightFunction::Tabulated { table: LogTable::from_samples(&r, &v).unwrap() };
        let s = strictify(&phi, 1, &g).unwrap();
        let rs = g.values();
        let vals: Vec<f64> = rs.iter().map(|&r| s.eval(r)).collect();
        assert!(vals.windows(2).all(|w| w[1] < w[0]));
        for (&r, &v) in rs.iter().zip(&vals) {
            let q = v / phi.eval(r);
            assert!((1.0 - 1e-12..=2.0 + 1e-12).contains(&q));
        }
    }

    #[test]
    fn dyadic_sums() {
        let rho = KernelFunction::power(0.5);
        // disjoint octaves: the lower sum is the integral itself
        // octave windows tile (0, r]; the reference integral runs to K₂r = 2r
        assert_relative_eq!(dyadic_lower_ratio(&rho, 1.0, 60), 0.5f64.sqrt(), max_relative = 1e-9);
        // τ frozen at the left end of each octave: (√2 − 1) / (2(2^{1/4} − 1))
        let tau = WeightFunction::Power { lambda: -0.25 };
        let want = (2f64.sqrt() - 1.0) / (2.0 * (2f64.powf(0.25) - 1.0));
        assert_relative_eq!(dyadic_upper_ratio(&rho, &tau, 1.0, 20), want, max_relative = 1e-9);
    }

    #[test]
    fn log_table_round_trip() {
        let t = LogTable::from_samples(&[1.0, 10.0], &[1.0, 100.0]).unwrap();
        assert_relative_eq!(t.ln_at(1000f64.ln()).exp(), 1e6, max_relative = 1e-12);
        assert!(LogTable::from_samples(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(LogTable::from_samples(&[1.0, 2.0], &[1.0, 0.0]).is_err());
    }
}
