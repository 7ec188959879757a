//! Characterization conditions as sampled ratio reports over a radius grid: the two
//! forms of the `I_ρ` condition, the `M_ρ` condition, the weight integral condition, and
//! the power-case exponent.

use serde::Serialize;

use crate::grids::{almost_increasing_constant, relative_change, LogGrid};
use crate::par;
use crate::quad::{integral_to_infinity, integral_to_zero, Improper};
use crate::weights_kernels::{check_int_rho, KernelFunction, Radial, WeightFunction};
use crate::young_calc::YoungFunction;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CriteriaError {
    #[error("integral condition violated: {0}")]
    IntegralCondition(String),
    #[error("no admissible exponent: {0}")]
    Exponent(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    Inconclusive,
}

/// Growth from the minimum to either end that counts as unbounded.
pub const FAIL_GROWTH: f64 = 10.0;
/// Relative change of the ratio sup under grid extension that counts as stable.
pub const STABLE_CHANGE: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SideHypothesis {
    pub name: String,
    pub holds: bool,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition_id: String,
    pub r_grid: LogGrid,
    pub r: Vec<f64>,
    #[serde(serialize_with = "crate::ext::serialize_vec_f64")]
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub ratio_sup: f64,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub ratio_sup_extended: f64,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub stability: f64,
    pub verdict: Verdict,
    /// Verdict of the same rule applied to the extended grid alone.
    pub verdict_extended: Verdict,
    pub side_hypotheses: Vec<SideHypothesis>,
    pub diagnostics: Vec<String>,
}

impl ConditionReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.lhs.iter().zip(&self.rhs).map(|(l, r)| l / r).collect()
    }

    /// `r,lhs,rhs,ratio` rows.
    pub fn csv_rows(&self) -> Vec<[String; 4]> {
        use crate::ext::fmt_f64;
        self.r
            .iter()
            .zip(&self.lhs)
            .zip(&self.rhs)
            .map(|((r, l), h)| [fmt_f64(*r), fmt_f64(*l), fmt_f64(*h), fmt_f64(l / h)])
            .collect()
    }
}

/// Minimum growth over the last decade before an end for the climb to count as ongoing.
pub const EDGE_GROWTH: f64 = 1e-3;

/// Ratio climbs monotonically (within `1e-8`) by more than [`FAIL_GROWTH`] from its
/// minimum to one end of the grid and is still climbing over the last decade there.
fn grows_without_bound(r: &[f64], ratios: &[f64]) -> bool {
    let n = ratios.len();
    let k = (0..n).fold(0, |b, i| if ratios[i] < ratios[b] { i } else { b });
    let min = ratios[k];
    if !(min > 0.0) {
        return false;
    }
    let monotone = |idx: &mut dyn Iterator<Item = usize>| {
        let mut prev = min;
        for i in idx {
            if ratios[i] < prev * (1.0 - 1e-8) {
                return false;
            }
            prev = ratios[i];
        }
        true
    };
    let still_growing = |end: usize, inner: usize| ratios[end] > ratios[inner] * (1.0 + EDGE_GROWTH);
    let right = n - 1;
    let right_inner = r.partition_point(|&x| x < r[right] / 10.0).min(right);
    let left_inner = r.partition_point(|&x| x <= r[0] * 10.0).saturating_sub(1);
    (monotone(&mut (k + 1..n)) && ratios[right] / min > FAIL_GROWTH && still_growing(right, right_inner))
        || (monotone(&mut (0..k).rev()) && ratios[0] / min > FAIL_GROWTH && still_growing(0, left_inner))
}

fn single_verdict(r: &[f64], lhs: &[f64], ratios: &[f64]) -> Verdict {
    if lhs.iter().any(|v| v.is_infinite()) || grows_without_bound(r, ratios) {
        Verdict::Fails
    } else {
        Verdict::Inconclusive
    }
}

/// Evaluates `lhs`/`rhs` on the grid and its extension and applies the verdict rule.
fn build_report<L, R>(
    id: &str,
    grid: &LogGrid,
    lhs_at: L,
    rhs_at: R,
    side_hypotheses: Vec<SideHypothesis>,
    diagnostics: Vec<String>,
) -> ConditionReport
where
    L: Fn(f64) -> f64 + Sync,
    R: Fn(f64) -> f64 + Sync,
{
    let eval = |g: &LogGrid| {
        let r = g.values();
        let pairs = par::map_slice(&r, |&x| (lhs_at(x), rhs_at(x)));
        let (lhs, rhs): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        (r, lhs, rhs)
    };
    let (r, lhs, rhs) = eval(grid);
    let (r_e, lhs_e, rhs_e) = eval(&grid.extended());
    let ratio = |l: &[f64], h: &[f64]| -> Vec<f64> { l.iter().zip(h).map(|(a, b)| a / b).collect() };
    let ratios = ratio(&lhs, &rhs);
    let ratios_e = ratio(&lhs_e, &rhs_e);
    let sup = |v: &[f64]| v.iter().fold(0.0f64, |m, &x| m.max(x));
    let ratio_sup = sup(&ratios);
    let ratio_sup_extended = sup(&ratios_e);
    let stability = relative_change(ratio_sup, ratio_sup_extended);
    let mut verdict = single_verdict(&r, &lhs, &ratios);
    let mut verdict_extended = single_verdict(&r_e, &lhs_e, &ratios_e);
    let stable = ratio_sup.is_finite() && stability < STABLE_CHANGE;
    if verdict == Verdict::Inconclusive && verdict_extended == Verdict::Inconclusive && stable {
        verdict = Verdict::Holds;
        verdict_extended = Verdict::Holds;
    }
    ConditionReport {
        condition_id: id.to_string(),
        r_grid: grid.clone(),
        r,
        lhs,
        rhs,
        ratio_sup,
        ratio_sup_extended,
        stability,
        verdict,
        verdict_extended,
        side_hypotheses,
        diagnostics,
    }
}

/// `Φ⁻¹(φ(e^s))` through the log-domain inverse.
fn inv_phi_at(phi: &YoungFunction, w: &WeightFunction, s: f64) -> f64 {
    phi.inverse_ln(w.ln_at(s))
}

fn ln_inv_phi_at(phi: &YoungFunction, w: &WeightFunction, s: f64) -> f64 {
    phi.ln_inverse_ln(w.ln_at(s))
}

fn require_int_rho(rho: &KernelFunction) -> Result<(), CriteriaError> {
    let c = check_int_rho(rho);
    if c.finite {
        Ok(())
    } else {
        Err(CriteriaError::IntegralCondition(format!(
            "int_0^1 rho(t)/t dt diverges for {}",
            rho.label()
        )))
    }
}

/// `∫₀^r ρ(t)/t dt`.
pub fn rho_integral_below(rho: &KernelFunction, r: f64) -> f64 {
    integral_to_zero(|s| rho.eval_ln(s), r).value_or_inf()
}

/// `∫_r^∞ ρ(t)Φ⁻¹(φ(t))/t dt`.
pub fn tail_integral(rho: &KernelFunction, phi: &YoungFunction, w: &WeightFunction, r: f64) -> Improper {
    integral_to_infinity(|s| (rho.ln_at(s) + ln_inv_phi_at(phi, w, s)).exp(), r)
}

/// `∫₀^r ρ/t · Φ⁻¹(φ(r)) + ∫_r^∞ ρ(t)Φ⁻¹(φ(t))/t dt ≤ A Ψ⁻¹(φ(r))`.
pub fn eval_ir_a(
    phi: &YoungFunction,
    psi: &YoungFunction,
    w: &WeightFunction,
    rho: &KernelFunction,
    grid: &LogGrid,
) -> Result<ConditionReport, CriteriaError> {
    require_int_rho(rho)?;
    Ok(build_report(
        "Ir_A",
        grid,
        |r| {
            let head = rho_integral_below(rho, r) * inv_phi_at(phi, w, r.ln());
            head + tail_integral(rho, phi, w, r).value_or_inf()
        },
        |r| inv_phi_at(psi, w, r.ln()),
        vec![],
        vec![format!("Phi={}, Psi={}, phi={}, rho={}", phi.label(), psi.label(), w.label(), rho.label())],
    ))
}

/// `∫₀^r ρ/t · Φ⁻¹(φ(r)) ≤ A′ Ψ⁻¹(φ(r))`.
pub fn eval_ir_a_prime(
    phi: &YoungFunction,
    psi: &YoungFunction,
    w: &WeightFunction,
    rho: &KernelFunction,
    grid: &LogGrid,
) -> Result<ConditionReport, CriteriaError> {
    require_int_rho(rho)?;
    Ok(build_report(
        "Ir_A_prime",
        grid,
        |r| rho_integral_below(rho, r) * inv_phi_at(phi, w, r.ln()),
        |r| inv_phi_at(psi, w, r.ln()),
        vec![],
        vec![format!("Phi={}, Psi={}, phi={}, rho={}", phi.label(), psi.label(), w.label(), rho.label())],
    ))
}

/// Running `sup_{0<t≤r} ρ(t)` at each grid radius, sampled at 8 points per decade from
/// `r_min·10⁻¹⁰` plus the radius itself.
fn running_sup(rho: &KernelFunction, radii: &[f64]) -> Vec<f64> {
    let step = std::f64::consts::LN_10 / 8.0;
    let mut s = (radii[0] * 1e-10).ln();
    let mut best = f64::NEG_INFINITY;
    radii
        .iter()
        .map(|&r| {
            let target = r.ln();
            while s < target {
                best = best.max(rho.ln_at(s));
                s += step;
            }
            best.max(rho.ln_at(target)).exp()
        })
        .collect()
}

/// `(sup_{0<t≤r} ρ(t)) Φ⁻¹(φ(r)) ≤ A Ψ⁻¹(φ(r))`, with its side hypotheses recorded.
pub fn eval_mr_a(
    phi: &YoungFunction,
    psi: &YoungFunction,
    w: &WeightFunction,
    rho: &KernelFunction,
    grid: &LogGrid,
) -> ConditionReport {
    let t_grid = LogGrid::default_t();
    let quotient: Vec<f64> = t_grid.values().iter().map(|&t| psi.inverse(t) / phi.inverse(t)).collect();
    let rev: Vec<f64> = quotient.iter().rev().copied().collect();
    let dec = almost_increasing_constant(&rev);
    let vanish = w.eval(1e30) / w.eval(1.0);
    let sides = vec![
        SideHypothesis {
            name: "Psi^-1/Phi^-1 almost decreasing".into(),
            holds: dec.is_finite(),
            constant: dec,
        },
        SideHypothesis { name: "phi(r) -> 0 as r -> inf".into(), holds: vanish < 1e-6, constant: vanish },
    ];
    let sup_for = |g: &LogGrid| {
        let radii = g.values();
        let sups = running_sup(rho, &radii);
        move |r: f64| {
            let k = radii.partition_point(|&x| x < r);
            sups[k.min(sups.len() - 1)]
        }
    };
    let base = sup_for(grid);
    let ext = sup_for(&grid.extended());
    let (gmin, gmax) = (grid.min, grid.max);
    // the report evaluates both grids; pick the table that contains the radius exactly
    let lhs = move |r: f64| {
        let s = if r >= gmin && r <= gmax && grid_contains(grid, r) { base(r) } else { ext(r) };
        s * inv_phi_at(phi, w, r.ln())
    };
    build_report(
        "Mr_A",
        grid,
        lhs,
        |r| inv_phi_at(psi, w, r.ln()),
        sides,
        vec![format!("Phi={}, Psi={}, phi={}, rho={}", phi.label(), psi.label(), w.label(), rho.label())],
    )
}

fn grid_contains(grid: &LogGrid, r: f64) -> bool {
    let v = grid.values();
    let k = v.partition_point(|&x| x < r);
    k < v.len() && v[k] == r
}

/// `∫₀^r φ(t)t^{n−1} dt ≤ C φ(r) rⁿ`.
pub fn check_weight_integral(w: &WeightFunction, n: u32, grid: &LogGrid) -> ConditionReport {
    let nf = n as f64;
    build_report(
        "weight_integral",
        grid,
        |r| integral_to_zero(|s| (w.ln_at(s) + nf * s).exp(), r).value_or_inf(),
        |r| (w.ln_at(r.ln()) + nf * r.ln()).exp(),
        vec![],
        vec![format!("phi={}, n={n}", w.label())],
    )
}

/// `q = λp/(λ + αp)`, the target exponent of the power case; `np/(n − αp)` for `λ = −n`.
pub fn solve_adams_exponent(p: f64, alpha: f64, lambda: f64, n: u32) -> Result<f64, CriteriaError> {
    let nf = n as f64;
    if !(p >= 1.0) || !(alpha > 0.0) || !(lambda >= -nf && lambda < 0.0) {
        return Err(CriteriaError::Exponent(format!(
            "need p >= 1, alpha > 0, -n <= lambda < 0; got p={p}, alpha={alpha}, lambda={lambda}"
        )));
    }
    if alpha + lambda / p >= 0.0 {
        return Err(CriteriaError::Exponent(format!(
            "alpha + lambda/p = {} >= 0: the tail integral diverges",
            alpha + lambda / p
        )));
    }
    Ok(lambda * p / (lambda + alpha * p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn adams(q: f64) -> (YoungFunction, YoungFunction, WeightFunction, KernelFunction) {
        (
            YoungFunction::Power { p: 2.0 },
            YoungFunction::Power { p: q },
            WeightFunction::ReciprocalPowerN { n: 1 },
            KernelFunction::power(0.25),
        )
    }

    #[test]
    fn adams_exponent_examples() {
        assert_relative_eq!(solve_adams_exponent(2.0, 0.25, -1.0, 1).unwrap(), 4.0, max_relative = 1e-14);
        assert!(solve_adams_exponent(2.0, 0.5, -1.0, 1).is_err());
        let q = solve_adams_exponent(2.0, 1e-9, -1.0, 1).unwrap();
        assert!((q - 2.0).abs() < 1e-6);
    }

    #[test]
    fn ir_a_power_case_constant() {
        // lhs = r^{α−n/p}(1/α + 1/(n/p − α)) = 8 r^{-1/4} against r^{-1/4}
        let (phi, psi, w, rho) = adams(4.0);
        let rep = eval_ir_a(&phi, &psi, &w, &rho, &LogGrid::default_r()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_relative_eq!(rep.ratio_sup, 8.0, max_relative = 1e-7);
        assert!(rep.stability < 1e-7);
        let rep = eval_ir_a_prime(&phi, &psi, &w, &rho, &LogGrid::default_r()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_relative_eq!(rep.ratio_sup, 4.0, max_relative = 1e-7);
    }

    #[test]
    fn ir_a_overshoot_fails_on_wide_grid() {
        let (phi, psi, w, rho) = adams(4.2);
        let rep = eval_ir_a(&phi, &psi, &w, &rho, &LogGrid::new(1e-60, 1e60, 241)).unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        let ratios = rep.ratios();
        assert!(ratios[0] / ratios[ratios.len() - 1] > 10.0);
    }

    #[test]
    fn ir_a_rejects_non_integrable_kernel() {
        let (phi, psi, w, _) = adams(4.0);
        assert!(eval_ir_a(&phi, &psi, &w, &KernelFunction::constant(1e-3), &LogGrid::default_r()).is_err());
    }

    #[test]
    fn ir_a_divergent_tail_fails() {
        // α + λ/p = 0.6 − 0.5 > 0: ∫_r^∞ t^{0.1} dt/t diverges
        let phi = YoungFunction::Power { p: 2.0 };
        let rep = eval_ir_a(&phi, &phi, &WeightFunction::ReciprocalPowerN { n: 1 }, &KernelFunction::power(0.6), &LogGrid::default_r())
            .unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
        assert!(rep.lhs.iter().all(|v| v.is_infinite()));
    }

    #[test]
    fn ir_a_prime_fails_for_large_gain() {
        let phi = YoungFunction::Power { p: 2.0 };
        let rep = eval_ir_a_prime(&phi, &phi, &WeightFunction::ReciprocalPowerN { n: 1 }, &KernelFunction::power(0.75), &LogGrid::default_r())
            .unwrap();
        assert_eq!(rep.verdict, Verdict::Fails);
    }

    #[test]
    fn exp_type_pair_holds() {
        // −1/p + α = −1/q with p = 1, α = 1/2 gives q = 2
        let phi = YoungFunction::ExpPower { p: 1.0 };
        let psi = YoungFunction::ExpPower { p: 2.0 };
        let w = WeightFunction::ReciprocalPowerN { n: 1 };
        let rep = eval_ir_a_prime(&phi, &psi, &w, &KernelFunction::log_kernel(0.5), &LogGrid::default_r()).unwrap();
        assert_eq!(rep.verdict, Verdict::Holds, "{:?}", rep.ratio_sup);
    }

    #[test]
    fn mr_a_examples() {
        let (phi, psi, w, rho) = adams(4.0);
        let rep = eval_mr_a(&phi, &psi, &w, &rho, &LogGrid::default_r());
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_relative_eq!(rep.ratio_sup, 1.0, max_relative = 1e-9);
        let c = eval_mr_a(&phi, &phi, &w, &KernelFunction::constant(1.0), &LogGrid::default_r());
        assert_eq!(c.verdict, Verdict::Holds);
        assert_eq!(c.ratio_sup, 1.0);
    }

    #[test]
    fn separation_with_log_kernel() {
        let phi = YoungFunction::Power { p: 2.0 };
        let w = WeightFunction::ReciprocalPowerN { n: 1 };
        let rho = KernelFunction::log_kernel(1.0);
        let g = LogGrid::default_r();
        let mr = eval_mr_a(&phi, &phi, &w, &rho, &g);
        let ir = eval_ir_a(&phi, &phi, &w, &rho, &g).unwrap();
        assert_eq!(mr.verdict, Verdict::Holds);
        assert_eq!(ir.verdict, Verdict::Fails);
        assert_eq!(mr.verdict_extended, Verdict::Holds);
        assert_eq!(ir.verdict_extended, Verdict::Fails);
    }

    #[test]
    fn weight_integral_examples() {
        let g = LogGrid::default_r();
        let rep = check_weight_integral(&WeightFunction::Power { lambda: -0.5 }, 1, &g);
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_relative_eq!(rep.ratio_sup, 2.0, max_relative = 1e-8);
        let rep = check_weight_integral(&WeightFunction::ReciprocalPowerN { n: 1 }, 1, &g);
        assert_eq!(rep.verdict, Verdict::Fails);
        let rep = check_weight_integral(&WeightFunction::Constant { c: 1.0 }, 1, &g);
        assert_eq!(rep.verdict, Verdict::Holds);
        assert_relative_eq!(rep.ratio_sup, 1.0, max_relative = 1e-8);
    }

    #[test]
    fn growth_rule() {
        let r = [1.0, 10.0, 100.0, 1000.0];
        assert!(grows_without_bound(&r, &[1.0, 2.0, 5.0, 11.0]));
        assert!(grows_without_bound(&r, &[30.0, 4.0, 2.0, 2.0]));
        assert!(!grows_without_bound(&r, &[1.0, 20.0, 3.0, 30.0]));
        assert!(!grows_without_bound(&r, &[1.0, 1.0, 1.0, 1.0]));
        // saturates: bounded even though the climb exceeds the factor
        assert!(!grows_without_bound(&r, &[0.01, 0.5, 1.0, 1.0]));
    }
}
