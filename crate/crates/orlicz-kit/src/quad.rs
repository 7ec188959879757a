//! Adaptive Simpson quadrature and improper integrals.
//!
//! Integrals of radial quantities are taken in the variable `s = ln t`, so
//! `∫ g(t) dt/t` becomes `∫ g(e^s) ds`. Improper tails are reached with a second
//! substitution `w = e^v` over decades of the distance `w` from the finite end;
//! this resolves both power-law and logarithmic decay without evaluating at
//! underflowing `t`.

/// Default relative tolerance for finite integrals and tail convergence.
pub const REL_TOL: f64 = 1e-10;

/// Maximum number of tail decades (in `w`) before giving up.
const MAX_DECADES: usize = 300;

/// A tail decade adding more than this fraction counts as growth.
const GROWTH_PER_DECADE: f64 = 0.01;

/// Consecutive growing decades that declare divergence.
const GROWTH_STREAK: usize = 4;

const MAX_DEPTH: u32 = 48;

/// Integrand evaluations allowed per [`simpson`] call; noisy integrands stop refining here.
const MAX_EVALS: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Improper {
    Finite(f64),
    /// Partial value reached when divergence was declared.
    Divergent { partial: f64, decades: usize },
}

impl Improper {
    pub fn value(self) -> Option<f64> {
        match self {
            Improper::Finite(v) => Some(v),
            Improper::Divergent { .. } => None,
        }
    }

    /// `∞` for a divergent integral.
    pub fn value_or_inf(self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Improper::Finite(_))
    }
}

/// `∫_a^b f` by adaptive Simpson. The interval is pre-split into eight panels so that
/// narrow features are not missed by the first five samples.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    const PANELS: usize = 8;
    let width = (b - a) / PANELS as f64;
    let mut coarse = Vec::with_capacity(PANELS);
    let mut rough = 0.0;
    for k in 0..PANELS {
        let lo = a + width * k as f64;
        let hi = if k + 1 == PANELS { b } else { lo + width };
        let m = 0.5 * (lo + hi);
        let (flo, fm, fhi) = (f(lo), f(m), f(hi));
        let whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi);
        rough += whole.abs();
        coarse.push((lo, hi, flo, fm, fhi, whole));
    }
    if !rough.is_finite() {
        return f64::INFINITY;
    }
    let eps = (rel_tol * rough).max(f64::MIN_POSITIVE) / PANELS as f64;
    let budget = std::cell::Cell::new(MAX_EVALS);
    coarse
        .into_iter()
        .map(|(lo, hi, flo, fm, fhi, whole)| refine(f, lo, hi, flo, fm, fhi, whole, eps, MAX_DEPTH, &budget))
        .sum()
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    eps: f64,
    depth: u32,
    budget: &std::cell::Cell<usize>,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    budget.set(budget.get().saturating_sub(2));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return left + right;
    }
    if depth == 0 || budget.get() == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1, budget)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1, budget)
}

/// `∫_0^∞ g(s0 + dir·w) dw` for a nonnegative integrand `g`, with `dir = ±1`.
///
/// The piece `w ∈ [0,1]` is integrated directly; beyond it the tail is processed by
/// decades `[10^k, 10^{k+1}]` in the variable `v = ln w`. The integral is finite once a
/// decade adds less than `rel_tol` of the running value, and divergent when
/// [`GROWTH_STREAK`] consecutive decades each add more than 1% with non-shrinking
/// increments. Exhausting [`MAX_DECADES`] without either verdict also reports divergence.
pub fn improper_log<G: Fn(f64) -> f64>(g: G, s0: f64, dir: f64, rel_tol: f64) -> Improper {
    let head = simpson(&|w: f64| g(s0 + dir * w), 0.0, 1.0, rel_tol);
    if !head.is_finite() {
        return Improper::Divergent { partial: head, decades: 0 };
    }
    let mut total = head;
    let mut streak = 0usize;
    let mut prev_inc = f64::NAN;
    let ln10 = std::f64::consts::LN_10;
    for k in 0..MAX_DECADES {
        let v0 = k as f64 * ln10;
        let v1 = v0 + ln10;
        let inc = simpson(
            &|v: f64| {
                let w = v.exp();
                let y = g(s0 + dir * w);
                if y == 0.0 {
                    0.0
                } else {
                    y * w
                }
            },
            v0,
            v1,
            rel_tol,
        );
        if !inc.is_finite() {
            return Improper::Divergent { partial: total, decades: k + 1 };
        }
        let before = total;
        total += inc;
        if inc <= rel_tol * total.abs() {
            return Improper::Finite(total);
        }
        let growing = inc > GROWTH_PER_DECADE * before.abs()
            && (prev_inc.is_nan() || inc >= 0.999 * prev_inc);
        streak = if growing { streak + 1 } else { 0 };
        if streak >= GROWTH_STREAK {
            return Improper::Divergent { partial: total, decades: k + 1 };
        }
        prev_inc = inc;
    }
    Improper::Divergent { partial: total, decades: MAX_DECADES }
}

/// `∫_0^r g(t) dt/t` with `g` given as a function of `ln t`.
pub fn integral_to_zero<G: Fn(f64) -> f64>(g_ln: G, r: f64) -> Improper {
    improper_log(g_ln, r.ln(), -1.0, REL_TOL)
}

/// `∫_r^∞ g(t) dt/t` with `g` given as a function of `ln t`.
pub fn integral_to_infinity<G: Fn(f64) -> f64>(g_ln: G, r: f64) -> Improper {
    improper_log(g_ln, r.ln(), 1.0, REL_TOL)
}

/// `∫_a^b g(t) dt/t` for `0 < a < b < ∞`, with `g` given as a function of `ln t`.
pub fn integral_log<G: Fn(f64) -> f64>(g_ln: G, a: f64, b: f64) -> f64 {
    simpson(&g_ln, a.ln(), b.ln(), REL_TOL)
}
