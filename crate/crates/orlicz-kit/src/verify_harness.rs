//! Every boundedness statement as a pass/fail property over the seeded corpus.
//!
//! A case is a list of subchecks. Positive subchecks fit the smallest constant on the
//! grid `{2^{k/4}}` that makes every instance satisfy the inequality and require it to
//! stay put when `h` halves. Negative subchecks follow a quantity along a sequence of
//! refinements (or window enlargements) and require it to keep growing.

use serde::Serialize;

use crate::corpus::{self, FieldSpec};
use crate::criteria::{self, Verdict};
use crate::fields_norms::{
    ball_average, global_norm, holder_pairing, level_counts, luxemburg_norm, weak_norm, weak_type_identity, Ball,
    BallFamily, FieldError, Grid, SampledField,
};
use crate::grids::{almost_increasing_constant, relative_change, LogGrid};
use crate::operators::{far_support_bound, frac_integral, frac_maximal, hl_maximal, OperatorError};
use crate::par;
use crate::quad::{integral_log, integral_to_zero};
use crate::weights_kernels::{dyadic_lower_ratio, dyadic_upper_ratio, KernelFunction, Radial, WeightFunction};
use crate::young_calc::{
    check_nabla2, default_k_grid, default_p_grid, pair_product_ratio, sandwich_excess, YClass, YoungFunction,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum HarnessError {
    #[error("invalid harness configuration: {0}")]
    Config(String),
    #[error("no statement matches '{0}'")]
    UnknownStatement(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HarnessConfig {
    pub seed: u64,
    pub corpus_size: usize,
    /// Window half-width `L` of the 1D grids.
    pub half_width: f64,
    /// Coarsest spacing; positive subchecks also run at `h/2`.
    pub h: f64,
    /// Largest relative change of a fitted constant under `h → h/2` for a pass.
    pub drift_tol: f64,
    /// Number of levels followed by negative subchecks.
    pub negative_levels: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig { seed: 7, corpus_size: 50, half_width: 4.0, h: 0.02, drift_tol: 0.10, negative_levels: 4 }
    }
}

impl HarnessConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.corpus_size == 0 {
            return Err(HarnessError::Config("corpus_size must be positive".into()));
        }
        if !(self.drift_tol > 0.0) {
            return Err(HarnessError::Config("drift_tol must be positive".into()));
        }
        if self.negative_levels < 4 {
            return Err(HarnessError::Config("negative_levels must be at least 4".into()));
        }
        if !(self.half_width >= 2.0) {
            return Err(HarnessError::Config("half_width must be at least 2 to hold the corpus".into()));
        }
        if !(self.h <= self.half_width / 100.0) || self.h > NORM_SPACING / 2.0 {
            return Err(HarnessError::Config(format!(
                "need h <= L/100 and h <= {}, got {}",
                NORM_SPACING / 2.0,
                self.h
            )));
        }
        Grid::new(1, self.half_width, self.h)?;
        Ok(())
    }

    fn grid(&self, h: f64) -> Grid {
        Grid::new(1, self.half_width, h).expect("validated spacing")
    }

    fn levels(&self, count: usize) -> Vec<f64> {
        (0..count).map(|k| self.h / 2f64.powi(k as i32)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubCheck {
    pub name: String,
    pub polarity: Polarity,
    /// Refinement parameter per level (`h`, or `L` for window growth).
    pub levels: Vec<f64>,
    /// Smallest admissible constant per level, before quantization.
    #[serde(serialize_with = "crate::ext::serialize_vec_f64")]
    pub raw: Vec<f64>,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub fitted_constant: f64,
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub refinement_drift: f64,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CaseInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    pub fields: String,
    pub balls: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyCase {
    pub statement_id: String,
    pub description: String,
    pub inputs: CaseInputs,
    /// Largest fitted constant over the positive subchecks.
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub fitted_constant: f64,
    /// Largest drift over the positive subchecks.
    #[serde(serialize_with = "crate::ext::serialize_f64")]
    pub refinement_drift: f64,
    pub pass: bool,
    pub subchecks: Vec<SubCheck>,
}

impl PropertyCase {
    fn new(id: &str, description: &str, inputs: CaseInputs, subchecks: Vec<SubCheck>) -> Self {
        let positives: Vec<&SubCheck> = subchecks.iter().filter(|s| s.polarity == Polarity::Positive).collect();
        let fitted_constant = positives.iter().map(|s| s.fitted_constant).fold(0.0, f64::max);
        let refinement_drift = positives.iter().map(|s| s.refinement_drift).fold(0.0, f64::max);
        let pass = subchecks.iter().all(|s| s.pass) && fitted_constant.is_finite();
        PropertyCase {
            statement_id: id.into(),
            description: description.into(),
            inputs,
            fitted_constant,
            refinement_drift,
            pass,
            subchecks,
        }
    }

    pub fn has_negative(&self) -> bool {
        self.subchecks.iter().any(|s| s.polarity == Polarity::Negative)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: HarnessConfig,
    pub cases: Vec<PropertyCase>,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

impl SuiteReport {
    /// `statement_id,polarity,fitted_constant,refinement_drift,pass` rows, one per subcheck.
    pub fn summary_rows(&self) -> Vec<[String; 6]> {
        use crate::ext::fmt_f64;
        let mut rows = Vec::new();
        for c in &self.cases {
            for s in &c.subchecks {
                let pol = match s.polarity {
                    Polarity::Positive => "positive",
                    Polarity::Negative => "negative",
                };
                rows.push([
                    c.statement_id.clone(),
                    s.name.clone(),
                    pol.into(),
                    fmt_f64(s.fitted_constant),
                    fmt_f64(s.refinement_drift),
                    s.pass.to_string(),
                ]);
            }
        }
        rows
    }
}

/// Statement ids in report order.
pub const STATEMENT_IDS: [&str; 27] = [
    "THM_3_1_weak",
    "THM_3_1_strong",
    "THM_3_2",
    "THM_3_3_strong_weak",
    "THM_3_3_strong_strong",
    "THM_3_3_weak_weak",
    "THM_3_4_i",
    "THM_3_4_ii",
    "THM_3_4_iii",
    "THM_3_5_i",
    "THM_3_5_ii",
    "THM_3_5_iii",
    "LEM_4_2",
    "LEM_4_4",
    "LEM_4_6",
    "LEM_4_7",
    "LEM_4_8",
    "LEM_5_1",
    "LEM_5_2",
    "LEM_5_3",
    "LEM_5_4",
    "LEM_5_5",
    "LEM_5_6",
    "EQ_2_6",
    "EQ_2_8",
    "EQ_4_1",
    "EQ_4_3",
];

/// Ids selected by `filter`: an exact id or a prefix ending at an `_` boundary.
pub fn select(filter: Option<&str>) -> Vec<&'static str> {
    STATEMENT_IDS
        .iter()
        .copied()
        .filter(|id| match filter {
            None => true,
            Some(f) => *id == f || id.starts_with(&format!("{f}_")),
        })
        .collect()
}

pub fn run_suite(cfg: &HarnessConfig, filter: Option<&str>) -> Result<SuiteReport, HarnessError> {
    cfg.validate()?;
    let ids = select(filter);
    if ids.is_empty() {
        return Err(HarnessError::UnknownStatement(filter.unwrap_or("").into()));
    }
    let ctx = Context::new(cfg);
    let results = par::map_slice(&ids, |id| run_case(&ctx, id));
    let cases = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    let passed = cases.iter().filter(|c| c.pass).count();
    let failed = cases.len() - passed;
    Ok(SuiteReport { config: cfg.clone(), cases, passed, failed, pass: failed == 0 })
}

pub fn run_statement(cfg: &HarnessConfig, id: &str) -> Result<PropertyCase, HarnessError> {
    cfg.validate()?;
    if !STATEMENT_IDS.contains(&id) {
        return Err(HarnessError::UnknownStatement(id.into()));
    }
    run_case(&Context::new(cfg), id)
}

fn run_case(ctx: &Context, id: &str) -> Result<PropertyCase, HarnessError> {
    match id {
        "THM_3_1_weak" => thm_3_1_weak(ctx),
        "THM_3_1_strong" => thm_3_1_strong(ctx),
        "THM_3_2" => thm_3_2(ctx),
        "THM_3_3_strong_weak" => thm_3_3(ctx, id, false, true),
        "THM_3_3_strong_strong" => thm_3_3(ctx, id, false, false),
        "THM_3_3_weak_weak" => thm_3_3(ctx, id, true, true),
        "THM_3_4_i" => pointwise(ctx, id, PointwiseOp::Integral),
        "THM_3_4_ii" => necessity(ctx, id, PointwiseOp::Integral, false),
        "THM_3_4_iii" => necessity(ctx, id, PointwiseOp::Integral, true),
        "THM_3_5_i" => pointwise(ctx, id, PointwiseOp::Maximal),
        "THM_3_5_ii" => necessity(ctx, id, PointwiseOp::Maximal, false),
        "THM_3_5_iii" => necessity(ctx, id, PointwiseOp::Maximal, true),
        "LEM_4_2" => lem_4_2(ctx),
        "LEM_4_4" => lem_4_4(ctx),
        "LEM_4_6" => lem_4_6(ctx),
        "LEM_4_7" => far_support(ctx, id, false),
        "LEM_4_8" => far_support(ctx, id, true),
        "LEM_5_1" => lem_5_1(ctx),
        "LEM_5_2" => lem_5_2(ctx),
        "LEM_5_3" => lem_5_3(ctx),
        "LEM_5_4" => lem_5_4(ctx),
        "LEM_5_5" => lem_5_5(ctx),
        "LEM_5_6" => lem_5_6(ctx),
        "EQ_2_6" => eq_2_6(),
        "EQ_2_8" => eq_2_8(ctx),
        "EQ_4_1" => eq_4_1(),
        "EQ_4_3" => eq_4_3(ctx),
        _ => Err(HarnessError::UnknownStatement(id.into())),
    }
}

// ---------------------------------------------------------------------------------------
// fitting

/// Step of the constant grid.
pub const FIT_STEP: f64 = 1.189_207_115_002_721; // 2^{1/4}

/// Smallest `2^{k/4}` at or above `raw` (rounding slack `1e-9`).
pub fn quantize_up(raw: f64) -> f64 {
    if raw.is_nan() || raw.is_infinite() {
        return f64::INFINITY;
    }
    if raw <= 2f64.powi(-20) {
        return 2f64.powi(-20);
    }
    let k = (4.0 * (raw * (1.0 - 1e-9)).log2()).ceil();
    2f64.powf(k / 4.0)
}

/// Monotone growth that does not flatten out: at least four levels, strictly
/// increasing, and no increment below half of the previous one. An infinite level
/// counts as divergence.
pub fn diverges(raw: &[f64]) -> bool {
    if raw.iter().any(|v| v.is_infinite()) {
        return true;
    }
    if raw.len() < 4 || raw.iter().any(|v| v.is_nan()) {
        return false;
    }
    let inc: Vec<f64> = raw.windows(2).map(|w| w[1] - w[0]).collect();
    inc.iter().all(|&d| d > 0.0) && inc.windows(2).all(|w| w[1] >= 0.5 * w[0])
}

fn max_drift(raw: &[f64]) -> f64 {
    raw.windows(2).map(|w| relative_change(w[0], w[1])).fold(0.0, f64::max)
}

fn positive(name: &str, levels: Vec<f64>, raw: Vec<f64>, drift_tol: f64, extra: Option<(bool, String)>) -> SubCheck {
    let top = raw.iter().fold(0.0f64, |m, &v| if v.is_nan() { f64::INFINITY } else { m.max(v) });
    let fitted_constant = quantize_up(top);
    let refinement_drift = max_drift(&raw);
    let (extra_ok, detail) = extra.unwrap_or((true, String::new()));
    let pass = fitted_constant.is_finite() && refinement_drift <= drift_tol && extra_ok;
    SubCheck {
        name: name.into(),
        polarity: Polarity::Positive,
        levels,
        raw,
        fitted_constant,
        refinement_drift,
        pass,
        detail,
    }
}

/// An inequality with a prescribed constant: passes when every level stays at or below
/// `bound` (relative slack `tol`).
fn fixed(name: &str, levels: Vec<f64>, raw: Vec<f64>, bound: f64, tol: f64) -> SubCheck {
    let top = raw.iter().fold(0.0f64, |m, &v| if v.is_nan() { f64::INFINITY } else { m.max(v) });
    let drift = max_drift(&raw);
    SubCheck {
        name: name.into(),
        polarity: Polarity::Positive,
        levels,
        raw,
        fitted_constant: quantize_up(top),
        refinement_drift: drift,
        pass: top <= bound * (1.0 + tol),
        detail: format!("bound {bound}, max {top}"),
    }
}

fn negative(name: &str, levels: Vec<f64>, raw: Vec<f64>) -> SubCheck {
    let drift = max_drift(&raw);
    let pass = diverges(&raw);
    SubCheck {
        name: name.into(),
        polarity: Polarity::Negative,
        levels,
        raw,
        fitted_constant: f64::INFINITY,
        refinement_drift: drift,
        pass,
        detail: if pass { "grows without flattening".into() } else { "bounded: negative test not confirmed".into() },
    }
}

/// A gate that must reject its input: passes when `rejected`.
fn gate(name: &str, rejected: bool, detail: String) -> SubCheck {
    SubCheck {
        name: name.into(),
        polarity: Polarity::Negative,
        levels: vec![],
        raw: vec![],
        fitted_constant: f64::INFINITY,
        refinement_drift: 0.0,
        pass: rejected,
        detail,
    }
}

/// Smallest `c ≥ 0` with `rhs(c) ≥ lhs`, for `rhs` nondecreasing in `c`.
fn min_scale<F: Fn(f64) -> f64>(lhs: f64, rhs: F) -> f64 {
    if lhs <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (1e-12, 1e12);
    if rhs(hi) < lhs {
        return f64::INFINITY;
    }
    if rhs(lo) >= lhs {
        return lo;
    }
    while hi / lo - 1.0 > 1e-10 {
        let mid = (lo * hi).sqrt();
        if rhs(mid) >= lhs {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `sup_t Φ(t) m(c·g, t)` over the whole window.
fn sup_phi_m(values: &[f64], cell: f64, phi: &YoungFunction, c: f64) -> f64 {
    let abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    level_counts(&abs, cell).iter().map(|&(v, m)| crate::ext::mul0(phi.eval(c * v), m)).fold(0.0, f64::max)
}

/// `∫ Φ(c|g|)` over the window.
fn integral_phi(values: &[f64], cell: f64, phi: &YoungFunction, c: f64) -> f64 {
    values.iter().map(|v| phi.eval(c * v.abs())).sum::<f64>() * cell
}

/// Smallest `C₁` with `Ψ(|op|/(C₁N)) ≤ Φ(Mf/(C₀N))` at every point, using
/// `Ψ(s) ≤ v ⟺ s ≤ Ψ⁻¹(v)`.
fn pointwise_required(op: &[f64], m: &[f64], norm: f64, phi: &YoungFunction, psi: &YoungFunction, c0: f64) -> f64 {
    if norm == 0.0 {
        return 0.0;
    }
    op.iter().zip(m).fold(0.0f64, |acc, (&o, &mv)| {
        if o == 0.0 {
            return acc;
        }
        let bound = psi.inverse(phi.eval(mv / (c0 * norm)));
        let need = if bound == 0.0 { f64::INFINITY } else { o.abs() / (norm * bound) };
        acc.max(need)
    })
}

// ---------------------------------------------------------------------------------------
// shared inputs

/// Spacing of the centres and smallest radius of the families used for global norms.
pub const NORM_SPACING: f64 = 0.04;

/// `r` moved to the nearest `(m + ½)h`, so that the lattice ball has measure exactly `|B|`.
pub fn snap_radius(r: f64, h: f64) -> f64 {
    ((r / h - 0.5).round().max(1.0) + 0.5) * h
}

/// Centres every [`NORM_SPACING`], snapped radii `NORM_SPACING·2^{k/2}` up to `2L`, plus
/// `extra` radii.
pub fn norm_family(grid: &Grid, extra: &[f64]) -> BallFamily {
    let stride = ((NORM_SPACING / grid.h).round() as usize).max(1);
    let top = 2.0 * grid.half_width;
    let mut radii: Vec<f64> = (0..)
        .map(|k| snap_radius(NORM_SPACING * 2f64.powf(k as f64 / 2.0), grid.h))
        .take_while(|&r| r <= top)
        .collect();
    radii.extend(extra.iter().map(|&r| snap_radius(r, grid.h)).filter(|&r| r <= top));
    radii.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    radii.dedup();
    BallFamily::new(grid, BallFamily::lattice_centers(grid, stride), radii).expect("radii lie in [h, 2L]")
}

struct Context {
    cfg: HarnessConfig,
    specs: Vec<FieldSpec>,
}

impl Context {
    fn new(cfg: &HarnessConfig) -> Self {
        Context { cfg: cfg.clone(), specs: corpus::generate(cfg.corpus_size, 1, cfg.seed) }
    }

    fn corpus_desc(&self) -> String {
        format!("{} seeded corpus fields (seed {})", self.specs.len(), self.cfg.seed)
    }

    /// `max` over the corpus of `per_field`, at spacing `h`.
    fn corpus_max<F>(&self, h: f64, per_field: F) -> Result<f64, HarnessError>
    where
        F: Fn(&SampledField, &Grid) -> Result<f64, HarnessError> + Sync,
    {
        let grid = self.cfg.grid(h);
        let vals = par::map_slice(&self.specs, |s| per_field(&s.sample(grid), &grid));
        let mut top = 0.0f64;
        for v in vals {
            let v = v?;
            top = if v.is_nan() { f64::INFINITY } else { top.max(v) };
        }
        Ok(top)
    }

    /// Raw constants at `h` and `h/2`.
    fn two_levels<F>(&self, per_field: F) -> Result<(Vec<f64>, Vec<f64>), HarnessError>
    where
        F: Fn(&SampledField, &Grid) -> Result<f64, HarnessError> + Sync,
    {
        self.levels_from(0, per_field)
    }

    /// Raw constants at `h/2^skip` and `h/2^{skip+1}`.
    fn levels_from<F>(&self, skip: usize, per_field: F) -> Result<(Vec<f64>, Vec<f64>), HarnessError>
    where
        F: Fn(&SampledField, &Grid) -> Result<f64, HarnessError> + Sync,
    {
        let levels = self.cfg.levels(skip + 2).split_off(skip);
        let raw = levels.iter().map(|&h| self.corpus_max(h, &per_field)).collect::<Result<Vec<_>, _>>()?;
        Ok((levels, raw))
    }
}

fn chi_centered(grid: Grid, r: f64) -> SampledField {
    SampledField::from_fn(grid, |x| if x[0].abs() < r - 1e-12 { 1.0 } else { 0.0 })
}

fn truncated_reciprocal(grid: Grid) -> SampledField {
    FieldSpec::TruncatedReciprocal { radius: 1.0 }.sample(grid)
}

fn power2() -> YoungFunction {
    YoungFunction::Power { p: 2.0 }
}

fn weight_r_inv() -> WeightFunction {
    WeightFunction::Power { lambda: -1.0 }
}

/// The power tuple `n = 1, p = 2, α = 1/4, λ = −1, q = 4`.
struct PowerTuple {
    phi: YoungFunction,
    psi: YoungFunction,
    w: WeightFunction,
    rho: KernelFunction,
    /// `Ψ⁻¹(φ(r)) = r^{-1/4}`.
    target_weight: WeightFunction,
}

fn power_tuple() -> PowerTuple {
    PowerTuple {
        phi: power2(),
        psi: YoungFunction::Power { p: 4.0 },
        w: weight_r_inv(),
        rho: KernelFunction::power(0.25),
        target_weight: WeightFunction::Power { lambda: -0.25 },
    }
}

fn nabla2(phi: &YoungFunction) -> bool {
    check_nabla2(phi, &LogGrid::default_t(), &default_k_grid()).holds
}

// ---------------------------------------------------------------------------------------
// maximal operator

fn maximal(f: &SampledField) -> Result<SampledField, HarnessError> {
    Ok(hl_maximal(f, &BallFamily::half_octave(&f.grid))?.field)
}

fn thm_3_1_weak(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let mut subs = Vec::new();
    for phi in [YoungFunction::Power { p: 1.0 }, power2(), YoungFunction::ShiftedSquare] {
        let (levels, raw) = ctx.two_levels(|f, g| {
            let m = maximal(f)?;
            let lhs = sup_phi_m(&m.values, g.h, &phi, 1.0);
            Ok(min_scale(lhs, |c| integral_phi(&f.values, g.h, &phi, c)))
        })?;
        subs.push(positive(&format!("corpus {}", phi.label()), levels, raw, ctx.cfg.drift_tol, None));
    }
    // χ_{[−1,1]} with Φ(t) = t: m(Mf,t) = 2(2/t − 1)⁺ + 2
    let phi = YoungFunction::Power { p: 1.0 };
    let levels = ctx.cfg.levels(2);
    let raw: Vec<f64> = levels
        .iter()
        .map(|&h| {
            let f = chi_centered(ctx.cfg.grid(h), 1.0 + h / 2.0);
            let m = maximal(&f)?;
            let lhs = sup_phi_m(&m.values, h, &phi, 1.0);
            Ok(min_scale(lhs, |c| integral_phi(&f.values, h, &phi, c)))
        })
        .collect::<Result<_, HarnessError>>()?;
    subs.push(fixed("indicator of [-1,1], power(p=1)", levels, raw, 4.0, 0.0));
    Ok(PropertyCase::new(
        "THM_3_1_weak",
        "sup_t Phi(t) m(Mf,t) <= int Phi(C|f|)",
        CaseInputs {
            phi: Some("power(p=1), power(p=2), shifted_square".into()),
            fields: ctx.corpus_desc(),
            balls: "all centres, radii h*2^(k/2)".into(),
            ..Default::default()
        },
        subs,
    ))
}

fn thm_3_1_strong(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let mut subs = Vec::new();
    for phi in [power2(), YoungFunction::ShiftedSquare] {
        if !nabla2(&phi) {
            subs.push(gate(&format!("{} not nabla_2", phi.label()), false, "strong variant not claimed".into()));
            continue;
        }
        let (levels, raw) = ctx.two_levels(|f, g| {
            let m = maximal(f)?;
            let lhs = integral_phi(&m.values, g.h, &phi, 1.0);
            Ok(min_scale(lhs, |c| integral_phi(&f.values, g.h, &phi, c)))
        })?;
        subs.push(positive(&format!("corpus {}", phi.label()), levels, raw, ctx.cfg.drift_tol, None));
    }
    // Φ(t) = t is not ∇₂: ∫Mχ grows like 4 ln L as the window widens
    let phi = YoungFunction::Power { p: 1.0 };
    subs.push(gate(
        "power(p=1) fails nabla_2",
        !nabla2(&phi),
        "strong variant only claimed under nabla_2".into(),
    ));
    let h = ctx.cfg.h;
    let widths: Vec<f64> = (0..ctx.cfg.negative_levels).map(|k| ctx.cfg.half_width * 2f64.powi(k as i32)).collect();
    let raw: Vec<f64> = widths
        .iter()
        .map(|&l| {
            let g = Grid::new(1, l, h)?;
            let f = chi_centered(g, 1.0 + h / 2.0);
            let m = maximal(&f)?;
            let lhs = integral_phi(&m.values, h, &phi, 1.0);
            Ok(min_scale(lhs, |c| integral_phi(&f.values, h, &phi, c)))
        })
        .collect::<Result<_, HarnessError>>()?;
    subs.push(negative("indicator, power(p=1), window L doubling", widths, raw));
    Ok(PropertyCase::new(
        "THM_3_1_strong",
        "int Phi(Mf) <= int Phi(C|f|) under nabla_2",
        CaseInputs {
            phi: Some("power(p=2), shifted_square; power(p=1) negative".into()),
            fields: ctx.corpus_desc(),
            balls: "all centres, radii h*2^(k/2)".into(),
            ..Default::default()
        },
        subs,
    ))
}

/// Smallest `C` with `sup Φ(t)m(Mf,t) ≤ sup Φ(t)m(Cf,t)`.
fn ww_required(f: &SampledField, phi: &YoungFunction) -> Result<f64, HarnessError> {
    let m = maximal(f)?;
    let h = f.grid.cell_volume();
    let lhs = sup_phi_m(&m.values, h, phi, 1.0);
    Ok(min_scale(lhs, |c| sup_phi_m(&f.values, h, phi, c)))
}

/// The ww-modular constant of `Φ(t) = t` on `min(1/|x|, 1/h)` at each level.
pub fn ww_truncated_reciprocal(cfg: &HarnessConfig, levels: &[f64]) -> Result<Vec<f64>, HarnessError> {
    let phi = YoungFunction::Power { p: 1.0 };
    levels.iter().map(|&h| ww_required(&truncated_reciprocal(Grid::new(1, cfg.half_width, h)?), &phi)).collect()
}

/// The ww-modular constant over the corpus at each level.
pub fn ww_corpus(cfg: &HarnessConfig, phi: &YoungFunction, levels: &[f64]) -> Result<Vec<f64>, HarnessError> {
    let ctx = Context::new(cfg);
    levels.iter().map(|&h| ctx.corpus_max(h, |f, _| ww_required(f, phi))).collect()
}

fn thm_3_2(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let mut subs = Vec::new();
    let levels = ctx.cfg.levels(ctx.cfg.negative_levels);
    for phi in [power2(), YoungFunction::ShiftedSquare] {
        let raw = ww_corpus(&ctx.cfg, &phi, &levels)?;
        subs.push(positive(&format!("corpus {}", phi.label()), levels.clone(), raw, ctx.cfg.drift_tol, None));
    }
    let raw = ww_truncated_reciprocal(&ctx.cfg, &levels)?;
    subs.push(negative("truncated 1/|x|, power(p=1), h halving", levels, raw));
    Ok(PropertyCase::new(
        "THM_3_2",
        "sup Phi(t) m(Mf,t) <= sup Phi(t) m(Cf,t) under nabla_2",
        CaseInputs {
            phi: Some("power(p=2), shifted_square; power(p=1) negative".into()),
            fields: format!("{}; min(1/|x|, 1/h) on |x| < 1", ctx.corpus_desc()),
            balls: "all centres, radii h*2^(k/2)".into(),
            ..Default::default()
        },
        subs,
    ))
}

fn thm_3_3(ctx: &Context, id: &str, weak_in: bool, weak_out: bool) -> Result<PropertyCase, HarnessError> {
    let w = weight_r_inv();
    let mut subs = Vec::new();
    let phis = [power2(), YoungFunction::ShiftedSquare, YoungFunction::Power { p: 1.0 }];
    for phi in phis {
        let gated = weak_in || !weak_out;
        if gated && !nabla2(&phi) {
            subs.push(gate(
                &format!("{} outside nabla_2", phi.label()),
                true,
                "variant not claimed; skipped".into(),
            ));
            continue;
        }
        // weak norms on both sides follow the peaks of the cusped fields, which the
        // coarsest grid does not resolve
        let skip = usize::from(weak_in);
        let (levels, raw) = ctx.levels_from(skip, |f, g| {
            let fam = norm_family(g, &[]);
            let m = maximal(f)?;
            let num = global_norm(&m, &phi, &w, &fam, weak_out).value;
            let den = global_norm(f, &phi, &w, &fam, weak_in).value;
            Ok(if num == 0.0 { 0.0 } else { num / den })
        })?;
        subs.push(positive(&format!("corpus {}", phi.label()), levels, raw, ctx.cfg.drift_tol, None));
    }
    let kind = match (weak_in, weak_out) {
        (false, true) => "strong to weak",
        (false, false) => "strong to strong",
        _ => "weak to weak",
    };
    Ok(PropertyCase::new(
        id,
        &format!("M bounded {kind} on the Orlicz-Morrey scale"),
        CaseInputs {
            phi: Some("power(p=2), shifted_square, power(p=1)".into()),
            weight: Some(w.label()),
            fields: ctx.corpus_desc(),
            balls: "norms over centres every 0.04, radii 0.04*2^(k/2)".into(),
            ..Default::default()
        },
        subs,
    ))
}

// ---------------------------------------------------------------------------------------
// I_ρ and M_ρ

#[derive(Clone, Copy, PartialEq)]
enum PointwiseOp {
    Integral,
    Maximal,
}

fn apply_op(op: PointwiseOp, f: &SampledField, rho: &KernelFunction) -> Result<SampledField, HarnessError> {
    Ok(match op {
        PointwiseOp::Integral => frac_integral(f, rho)?.field,
        PointwiseOp::Maximal => frac_maximal(f, rho, &BallFamily::half_octave(&f.grid))?.field,
    })
}

/// Pointwise constant `C₁` for `C₀ = 1` over the corpus at `h` and `h/2`.
pub fn pointwise_constants(
    cfg: &HarnessConfig,
    phi: &YoungFunction,
    psi: &YoungFunction,
    w: &WeightFunction,
    rho: &KernelFunction,
    maximal_op: bool,
    weak_norm_in: bool,
) -> Result<Vec<f64>, HarnessError> {
    let ctx = Context::new(cfg);
    let op = if maximal_op { PointwiseOp::Maximal } else { PointwiseOp::Integral };
    Ok(pointwise_levels(&ctx, op, phi, psi, w, rho, weak_norm_in)?.1)
}

fn pointwise_levels(
    ctx: &Context,
    op: PointwiseOp,
    phi: &YoungFunction,
    psi: &YoungFunction,
    w: &WeightFunction,
    rho: &KernelFunction,
    weak_in: bool,
) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    ctx.two_levels(|f, g| {
        let fam = norm_family(g, &[]);
        let norm = global_norm(f, phi, w, &fam, weak_in).value;
        let t = apply_op(op, f, rho)?;
        let m = maximal(f)?;
        Ok(pointwise_required(&t.values, &m.values, norm, phi, psi, 1.0))
    })
}

fn pointwise(ctx: &Context, id: &str, op: PointwiseOp) -> Result<PropertyCase, HarnessError> {
    let t = power_tuple();
    let rgrid = LogGrid::default_r();
    let mut subs = Vec::new();
    let holds = |phi: &YoungFunction, psi: &YoungFunction, w: &WeightFunction, rho: &KernelFunction| match op {
        PointwiseOp::Integral => criteria::eval_ir_a(phi, psi, w, rho, &rgrid).map(|r| r.verdict),
        PointwiseOp::Maximal => Ok(criteria::eval_mr_a(phi, psi, w, rho, &rgrid).verdict),
    };
    let verdict = holds(&t.phi, &t.psi, &t.w, &t.rho).unwrap_or(Verdict::Fails);
    if verdict == Verdict::Holds {
        let (levels, raw) = pointwise_levels(ctx, op, &t.phi, &t.psi, &t.w, &t.rho, false)?;
        subs.push(positive("power tuple, strong norm", levels.clone(), raw.clone(), ctx.cfg.drift_tol, None));
        // |Tf| ≤ C (Mf)^{p/q} ‖f‖^{1−p/q} is the same requirement for power Φ, Ψ
        subs.push(positive("power tuple, Morrey form", levels, raw, ctx.cfg.drift_tol, None));
        if nabla2(&t.phi) {
            let (levels, raw) = pointwise_levels(ctx, op, &t.phi, &t.psi, &t.w, &t.rho, true)?;
            subs.push(positive("power tuple, weak norm", levels, raw, ctx.cfg.drift_tol, None));
        }
    } else {
        subs.push(gate("power tuple condition", false, format!("condition verdict {verdict:?}")));
    }
    // overshooting target exponent: the integral condition rejects it
    let over = YoungFunction::Power { p: 4.2 };
    if op == PointwiseOp::Integral {
        let wide = LogGrid::new(1e-60, 1e60, 241);
        let v = criteria::eval_ir_a(&t.phi, &over, &t.w, &t.rho, &wide).map(|r| r.verdict).unwrap_or(Verdict::Fails);
        subs.push(gate("q = 4.2 rejected by the condition", v == Verdict::Fails, format!("verdict {v:?}")));
    }
    match op {
        PointwiseOp::Integral => {
            // I_α χ_{(−1,1)}(0) = 2/α, Mχ(0) = 1. The self-cell core leaves an error of
            // order h^α, so compare the rate over h → h/16 and the extrapolated limit.
            let at_origin = |h: f64| -> Result<(f64, f64), HarnessError> {
                let g = Grid::new(1, 2.0, h)?;
                let chi = chi_centered(g, 1.0);
                Ok((frac_integral(&chi, &t.rho)?.field.at(g.origin()), maximal(&chi)?.at(g.origin())))
            };
            let (h1, h2) = (0.01, 0.01 / 16.0);
            let ((i1, m1), (i2, m2)) = (at_origin(h1)?, at_origin(h2)?);
            let exact = 2.0 / 0.25;
            let rate = (i1 - exact) / (i2 - exact);
            let limit = 2.0 * i2 - i1;
            let err = (limit / exact - 1.0).abs().max((m1 - 1.0).abs()).max((m2 - 1.0).abs());
            let mut s = fixed("indicator at the origin: I = 2/alpha, M = 1", vec![h1, h2], vec![1.0 + err], 1.0, 0.005);
            s.pass &= (rate / 2.0 - 1.0).abs() < 0.05;
            s.detail = format!("I(0) = {i1}, {i2}; error ratio {rate} (expected 2); extrapolated {limit}");
            subs.push(s);
        }
        PointwiseOp::Maximal => {
            // log kernel: the maximal condition holds while the integral one fails
            let rho = KernelFunction::log_kernel(1.0);
            let (phi, w) = (power2(), weight_r_inv());
            let mr = criteria::eval_mr_a(&phi, &phi, &w, &rho, &rgrid).verdict;
            let ir = criteria::eval_ir_a(&phi, &phi, &w, &rho, &rgrid).map(|r| r.verdict).unwrap_or(Verdict::Fails);
            subs.push(gate(
                "log kernel: integral condition fails",
                ir == Verdict::Fails,
                format!("Mr_A {mr:?}, Ir_A {ir:?}"),
            ));
            if mr == Verdict::Holds {
                let (levels, raw) = pointwise_levels(ctx, op, &phi, &phi, &w, &rho, false)?;
                subs.push(positive("log kernel, Phi = Psi", levels, raw, ctx.cfg.drift_tol, None));
            }
            // ρ ≡ 1, Φ = Ψ: C₁ = C₀
            let one = KernelFunction::constant(1.0);
            let (levels, raw) = pointwise_levels(ctx, op, &phi, &phi, &w, &one, false)?;
            subs.push(fixed("rho = 1 gives C1 = C0", levels, raw, 1.0, 1e-9));
        }
    }
    let what = if op == PointwiseOp::Integral { "I_rho" } else { "M_rho" };
    Ok(PropertyCase::new(
        id,
        &format!("Psi(|{what} f|/(C1|f|)) <= Phi(Mf/(C0|f|)) pointwise, C0 = 1"),
        CaseInputs {
            phi: Some(t.phi.label()),
            psi: Some(t.psi.label()),
            weight: Some(t.w.label()),
            kernel: Some(t.rho.label()),
            fields: ctx.corpus_desc(),
            balls: "operator over all centres, radii h*2^(k/2); norms over centres every 0.04".into(),
        },
        subs,
    ))
}

/// Test radii for the extremal chains.
fn chain_radii() -> Vec<f64> {
    (0..9).map(|k| 0.1 * 2f64.powf(k as f64 / 2.0)).collect()
}

/// `sup_{0<t≤r} ρ(t)` from 4000 log-spaced samples down to `r·10⁻¹²` plus `r` itself.
pub fn sup_rho_below(rho: &KernelFunction, r: f64) -> f64 {
    let (lo, hi) = ((r * 1e-12).ln(), r.ln());
    (0..=4000).map(|k| rho.ln_at(lo + (hi - lo) * k as f64 / 4000.0)).fold(f64::NEG_INFINITY, f64::max).exp()
}

fn necessity(ctx: &Context, id: &str, op: PointwiseOp, l1_target: bool) -> Result<PropertyCase, HarnessError> {
    let t = power_tuple();
    let mut subs = Vec::new();
    let radii = chain_radii();
    // condition ratio a(r) against the operator ratio measured on χ_{B(0,r)}
    let a = |r: f64| {
        let head = match op {
            PointwiseOp::Integral => integral_to_zero(|s| t.rho.eval_ln(s), r).value_or_inf(),
            PointwiseOp::Maximal => sup_rho_below(&t.rho, r),
        };
        head * t.phi.inverse(t.w.eval(r)) / t.psi.inverse(t.w.eval(r))
    };
    let levels = ctx.cfg.levels(2);
    let mut raw = Vec::new();
    for &h in &levels {
        let g = ctx.cfg.grid(h);
        let fam = norm_family(&g, &radii);
        let per_r = par::map_slice(&radii, |&r| -> Result<f64, HarnessError> {
            let rs = snap_radius(r, h);
            let chi = chi_centered(g, rs);
            let out = apply_op(op, &chi, &t.rho)?;
            let num = if l1_target {
                global_norm(&out, &YoungFunction::Power { p: 1.0 }, &t.target_weight, &fam, false).value
            } else {
                global_norm(&out, &t.psi, &t.w, &fam, true).value
            };
            let den = global_norm(&chi, &t.phi, &t.w, &fam, false).value;
            Ok(a(rs) / (num / den))
        });
        let mut top = 0.0f64;
        for v in per_r {
            top = top.max(v?);
        }
        raw.push(top);
    }
    let target = if l1_target { "L^(1, Psi^-1(phi)) norm" } else { "weak Psi norm" };
    subs.push(positive(&format!("extremal chain, {target}"), levels.clone(), raw, ctx.cfg.drift_tol, None));
    let rgrid = LogGrid::default_r();
    let cond = match op {
        PointwiseOp::Integral => criteria::eval_ir_a_prime(&t.phi, &t.psi, &t.w, &t.rho, &rgrid).map(|r| r.verdict),
        PointwiseOp::Maximal => Ok(criteria::eval_mr_a(&t.phi, &t.psi, &t.w, &t.rho, &rgrid).verdict),
    }
    .unwrap_or(Verdict::Fails);
    subs.push(fixed(
        "condition verdict holds",
        vec![],
        vec![if cond == Verdict::Holds { 1.0 } else { f64::INFINITY }],
        1.0,
        0.0,
    ));
    if l1_target {
        // χ_B in L^(1,θ): 1/θ(r) ≤ weak ≤ strong ≤ C/θ(r)
        let one = YoungFunction::Power { p: 1.0 };
        let mut raw = Vec::new();
        let mut lower_ok = true;
        for &h in &levels {
            let g = ctx.cfg.grid(h);
            let fam = norm_family(&g, &radii);
            let mut top = 0.0f64;
            for &r in &radii {
                let rs = snap_radius(r, h);
                let chi = chi_centered(g, rs);
                let theta = t.target_weight.eval(rs);
                let wk = global_norm(&chi, &one, &t.target_weight, &fam, true).value;
                let st = global_norm(&chi, &one, &t.target_weight, &fam, false).value;
                lower_ok &= 1.0 / theta <= wk * (1.0 + 1e-9) && wk <= st * (1.0 + 1e-9);
                top = top.max(st * theta);
            }
            raw.push(top);
        }
        subs.push(positive(
            "indicator norms in L^(1, theta)",
            levels,
            raw,
            ctx.cfg.drift_tol,
            Some((lower_ok, format!("lower bounds {}", if lower_ok { "hold" } else { "violated" }))),
        ));
    } else if op == PointwiseOp::Integral {
        let ok = criteria::check_weight_integral(&t.w, 1, &rgrid).verdict == Verdict::Fails;
        subs.push(gate(
            "weight integral fails for phi = 1/r: second branch not applicable",
            ok,
            "branch runs under the weight integral condition, see LEM_5_3 and LEM_5_4".into(),
        ));
    }
    let what = if op == PointwiseOp::Integral { "I_rho" } else { "M_rho" };
    Ok(PropertyCase::new(
        id,
        &format!("boundedness of {what} forces the condition, through extremal indicators"),
        CaseInputs {
            phi: Some(t.phi.label()),
            psi: Some(t.psi.label()),
            weight: Some(t.w.label()),
            kernel: Some(t.rho.label()),
            fields: "indicators of B(0,r), r = 0.1*2^(k/2), k = 0..8".into(),
            balls: "norms over centres every 0.04 plus the test radii".into(),
        },
        subs,
    ))
}

// ---------------------------------------------------------------------------------------
// norms of indicators, embeddings, far support

fn lem_4_2(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let w = weight_r_inv();
    let radii = chain_radii();
    let mut subs = Vec::new();
    for phi in [power2(), YoungFunction::ShiftedSquare] {
        let levels = ctx.cfg.levels(2);
        let mut raw = Vec::new();
        let mut lower_ok = true;
        for &h in &levels {
            let g = ctx.cfg.grid(h);
            let fam = norm_family(&g, &radii);
            let vals = par::map_slice(&radii, |&r| {
                let rs = snap_radius(r, h);
                let chi = chi_centered(g, rs);
                let inv = phi.inverse(w.eval(rs));
                let wk = global_norm(&chi, &phi, &w, &fam, true).value;
                let st = global_norm(&chi, &phi, &w, &fam, false).value;
                (1.0 / inv <= wk * (1.0 + 1e-6) && wk <= st * (1.0 + 1e-6), st * inv)
            });
            lower_ok &= vals.iter().all(|v| v.0);
            raw.push(vals.iter().map(|v| v.1).fold(0.0, f64::max));
        }
        subs.push(positive(
            &format!("indicator sandwich {}", phi.label()),
            levels,
            raw,
            ctx.cfg.drift_tol,
            Some((lower_ok, format!("lower bounds {}", if lower_ok { "hold" } else { "violated" }))),
        ));
    }
    Ok(PropertyCase::new(
        "LEM_4_2",
        "1/Phi^-1(phi(r)) <= weak norm of chi_B <= norm of chi_B <= C/Phi^-1(phi(r))",
        CaseInputs {
            phi: Some("power(p=2), shifted_square".into()),
            weight: Some(w.label()),
            fields: "indicators of B(0,r)".into(),
            balls: "norms over centres every 0.04 plus the test radii".into(),
            ..Default::default()
        },
        subs,
    ))
}

/// Balls for the per-ball embedding checks: centres every 0.2 in `[-1.6, 1.6]`, snapped
/// radii `0.05·2^{k/2}` up to 1.6.
fn embedding_balls(g: &Grid) -> Vec<Ball> {
    let centers: Vec<f64> = (-8..=8).map(|k| 0.2 * k as f64).collect();
    let radii: Vec<f64> = (0..)
        .map(|k| snap_radius(0.05 * 2f64.powf(k as f64 / 2.0), g.h))
        .take_while(|&r| r <= 1.6)
        .collect();
    let mut out = Vec::new();
    for &r in &radii {
        for &c in &centers {
            out.push(Ball::new(g, [g.axis_index(c), 0], r).expect("inside the window"));
        }
    }
    out
}

/// `min_p 1 + C_p/(p − 1)` over `p` with `Φ(t)/t^p` almost increasing with constant `C_p`.
pub fn weak_embedding_bound(phi: &YoungFunction) -> f64 {
    let grid = LogGrid::default_t();
    default_p_grid()
        .into_iter()
        .filter_map(|p| {
            let q = |g: &LogGrid| {
                let v: Vec<f64> = g.values().iter().map(|&t| phi.eval(t) / t.powf(p)).collect();
                almost_increasing_constant(&v)
            };
            let (c, ce) = (q(&grid), q(&grid.extended()));
            (c.is_finite() && relative_change(c, ce) < 0.01).then(|| 1.0 + c / (p - 1.0))
        })
        .fold(f64::INFINITY, f64::min)
}

fn embedding(ctx: &Context, phi: &YoungFunction, weak: bool) -> Result<(Vec<f64>, Vec<f64>), HarnessError> {
    let w = weight_r_inv();
    ctx.two_levels(|f, g| {
        let mut top = 0.0f64;
        for b in embedding_balls(g) {
            let avg = ball_average(f, &b);
            if avg == 0.0 {
                continue;
            }
            let n = if weak { weak_norm(f, phi, &w, &b) } else { luxemburg_norm(f, phi, &w, &b) };
            top = top.max(avg / (phi.inverse(w.eval(b.radius)) * n));
        }
        Ok(top)
    })
}

fn lem_4_4(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let mut subs = Vec::new();
    for phi in [power2(), YoungFunction::ShiftedSquare] {
        let (levels, raw) = embedding(ctx, &phi, false)?;
        subs.push(fixed(&format!("mean bound with constant 2, {}", phi.label()), levels, raw, 2.0, 1e-9));
    }
    Ok(PropertyCase::new(
        "LEM_4_4",
        "mean of |f| over B <= 2 Phi^-1(phi(r)) |f|_{Phi,phi,B}",
        CaseInputs {
            phi: Some("power(p=2), shifted_square".into()),
            weight: Some(weight_r_inv().label()),
            fields: ctx.corpus_desc(),
            balls: "centres every 0.2 in [-1.6,1.6], radii 0.05*2^(k/2) <= 1.6".into(),
            ..Default::default()
        },
        subs,
    ))
}

fn lem_4_6(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let mut subs = Vec::new();
    for phi in [power2(), YoungFunction::ShiftedSquare] {
        let (levels, raw) = embedding(ctx, &phi, true)?;
        let bound = weak_embedding_bound(&phi);
        let top = raw.iter().fold(0.0f64, |m, &v| m.max(v));
        let ok = top <= bound * 1.05;
        subs.push(positive(
            &format!("weak mean bound, {}", phi.label()),
            levels,
            raw,
            ctx.cfg.drift_tol,
            Some((ok, format!("split-argument bound {bound}, max {top}"))),
        ));
    }
    Ok(PropertyCase::new(
        "LEM_4_6",
        "mean of |f| over B <= C Phi^-1(phi(r)) |f|_{Phi,phi,B,weak} under nabla_2",
        CaseInputs {
            phi: Some("power(p=2), shifted_square".into()),
            weight: Some(weight_r_inv().label()),
            fields: ctx.corpus_desc(),
            balls: "centres every 0.2 in [-1.6,1.6], radii 0.05*2^(k/2) <= 1.6".into(),
            ..Default::default()
        },
        subs,
    ))
}

fn far_support(ctx: &Context, id: &str, weak: bool) -> Result<PropertyCase, HarnessError> {
    let w = weight_r_inv();
    let mut subs = Vec::new();
    let phis = if weak { vec![power2()] } else { vec![power2(), YoungFunction::ShiftedSquare, YoungFunction::Power { p: 1.0 }] };
    for phi in phis {
        let (levels, raw) = ctx.two_levels(|f, g| {
            let m = maximal(f)?;
            let fam = norm_family(g, &[]);
            let norm = global_norm(f, &phi, &w, &fam, weak).value;
            let mut top = 0.0f64;
            for c in [-3.0, 3.0] {
                for r in [0.1, 0.2, 0.3, 0.45] {
                    let b = Ball::new(g, [g.axis_index(c), 0], snap_radius(r, g.h))?;
                    let fs = far_support_bound(f, &m, &phi, w.eval(b.radius), &b, norm)?;
                    top = top.max(fs.ratio());
                }
            }
            Ok(top)
        })?;
        subs.push(positive(&format!("corpus {}", phi.label()), levels, raw, ctx.cfg.drift_tol, None));
    }
    Ok(PropertyCase::new(
        id,
        &format!(
            "Mf <= C Phi^-1(phi(r)) |f|{} on B when f vanishes on 2B",
            if weak { "_weak" } else { "" }
        ),
        CaseInputs {
            phi: Some(if weak { "power(p=2)" } else { "power(p=2), shifted_square, power(p=1)" }.into()),
            weight: Some(w.label()),
            fields: ctx.corpus_desc(),
            balls: "B(+-3, r), r in {0.1, 0.2, 0.3, 0.45}".into(),
            ..Default::default()
        },
        subs,
    ))
}

// ---------------------------------------------------------------------------------------
// kernel lemmas

fn lem_5_1(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let tau = |s: f64| -0.25 * s;
    let mut subs = Vec::new();
    let kernels = [
        (KernelFunction::power(0.5), LogGrid::new(1e-3, 1e2, 21)),
        (KernelFunction::log_kernel(1.0), LogGrid::new(1e-3, 1e2, 21)),
        (KernelFunction::bessel_type(0.5), LogGrid::new(1e-3, 1e1, 17)),
    ];
    for (rho, grid) in kernels {
        let depths = [40, 60];
        let lower: Vec<f64> = depths
            .iter()
            .map(|&d| grid.values().iter().map(|&r| dyadic_lower_ratio(&rho, r, d)).fold(0.0, f64::max))
            .collect();
        let upper: Vec<f64> = depths
            .iter()
            .map(|&d| grid.values().iter().map(|&r| dyadic_upper_ratio(&rho, &tau, r, d)).fold(0.0, f64::max))
            .collect();
        let lv: Vec<f64> = depths.iter().map(|&d| d as f64).collect();
        subs.push(positive(&format!("lower sum {}", rho.label()), lv.clone(), lower, ctx.cfg.drift_tol, None));
        subs.push(positive(&format!("upper sum {}", rho.label()), lv, upper, ctx.cfg.drift_tol, None));
    }
    Ok(PropertyCase::new(
        "LEM_5_1",
        "dyadic sums of tilde-rho against the integrals of rho/t",
        CaseInputs {
            kernel: Some("power(0.5), log_kernel(1), bessel_type(0.5)".into()),
            weight: Some("tau(r) = r^(-1/4)".into()),
            fields: "none".into(),
            balls: "none; r on log grids, levels are truncation depths".into(),
            ..Default::default()
        },
        subs,
    ))
}

fn lem_5_2(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let mut subs = Vec::new();
    for rho in [KernelFunction::power(0.25), KernelFunction::log_kernel(0.5)] {
        let levels = ctx.cfg.levels(2);
        let mut raw = Vec::new();
        for &h in &levels {
            let g = ctx.cfg.grid(h);
            let vals = par::map_slice(&chain_radii(), |&r| -> Result<f64, HarnessError> {
                let chi = chi_centered(g, r);
                let i = frac_integral(&chi, &rho)?.field;
                let lower = integral_to_zero(|s| rho.eval_ln(s), r / 2.0).value_or_inf();
                let inner = (0..g.side).filter(|&k| g.coord(k).abs() < r / 2.0);
                Ok(inner.map(|k| lower / i.values[k]).fold(0.0, f64::max))
            });
            raw.push(vals.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max));
        }
        subs.push(positive(&format!("indicator lower bound, {}", rho.label()), levels, raw, ctx.cfg.drift_tol, None));
    }
    Ok(PropertyCase::new(
        "LEM_5_2",
        "int_0^{R/2} rho/t on B(0,R/2) <= C I_rho chi_B(0,R)",
        CaseInputs {
            kernel: Some("power(0.25), log_kernel(0.5)".into()),
            fields: "indicators of B(0,R), R = 0.1*2^(k/2)".into(),
            balls: "none".into(),
            ..Default::default()
        },
        subs,
    ))
}

/// `Φ⁻¹(φ(|x|))` with `|x|` floored at `h/2`.
fn radial_extremal(g: Grid, phi: &YoungFunction, w: &WeightFunction, inner: f64) -> SampledField {
    SampledField::from_fn(g, |x| {
        let d = x[0].abs();
        if d < inner {
            0.0
        } else {
            phi.inverse(w.eval(d.max(g.h / 2.0)))
        }
    })
}

fn lem_5_3(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let phi = power2();
    let mut subs = Vec::new();
    let good = WeightFunction::Power { lambda: -0.5 };
    let wi = criteria::check_weight_integral(&good, 1, &LogGrid::default_r()).verdict;
    let levels = ctx.cfg.levels(2);
    let raw: Vec<f64> = levels
        .iter()
        .map(|&h| {
            let g = ctx.cfg.grid(h);
            global_norm(&radial_extremal(g, &phi, &good, 0.0), &phi, &good, &norm_family(&g, &[]), false).value
        })
        .collect();
    subs.push(positive(
        "g = Phi^-1(phi(|x|)), phi = r^-1/2",
        levels,
        raw,
        ctx.cfg.drift_tol,
        Some((wi == Verdict::Holds, format!("weight integral {wi:?}"))),
    ));
    let bad = weight_r_inv();
    let levels = ctx.cfg.levels(ctx.cfg.negative_levels);
    let raw: Vec<f64> = levels
        .iter()
        .map(|&h| {
            let g = ctx.cfg.grid(h);
            global_norm(&radial_extremal(g, &phi, &bad, 0.0), &phi, &bad, &norm_family(&g, &[]), false).value
        })
        .collect();
    subs.push(negative("phi = 1/r violates the weight integral: norm grows", levels, raw));
    Ok(PropertyCase::new(
        "LEM_5_3",
        "g = Phi^-1(phi(|x|)) has finite norm under the weight integral condition",
        CaseInputs {
            phi: Some(phi.label()),
            weight: Some("power(lambda=-0.5); power(lambda=-1) negative".into()),
            fields: "g on the window, |x| floored at h/2".into(),
            balls: "norms over centres every 0.04".into(),
            ..Default::default()
        },
        subs,
    ))
}

fn lem_5_4(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let t = power_tuple();
    let l = ctx.cfg.half_width;
    let levels = ctx.cfg.levels(2);
    let mut raw = Vec::new();
    for &h in &levels {
        let g = ctx.cfg.grid(h);
        let vals = par::map_slice(&[0.1, 0.2, 0.4, 0.8], |&r| -> Result<f64, HarnessError> {
            let gr = radial_extremal(g, &t.phi, &t.w, r);
            let i = frac_integral(&gr, &t.rho)?.field;
            // window-truncated tail
            let tail = integral_log(|s| (t.rho.ln_at(s) + t.phi.ln_inverse_ln(t.w.ln_at(s))).exp(), 2.0 * r, l);
            let inner = (0..g.side).filter(|&k| g.coord(k).abs() < r);
            Ok(inner.map(|k| tail / i.values[k]).fold(0.0, f64::max))
        });
        raw.push(vals.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max));
    }
    Ok(PropertyCase::new(
        "LEM_5_4",
        "int_{2R}^inf rho Phi^-1(phi)/t on B(0,R) <= C I_rho g_R",
        CaseInputs {
            phi: Some(t.phi.label()),
            weight: Some(t.w.label()),
            kernel: Some(t.rho.label()),
            fields: "g_R = Phi^-1(phi(|x|)) off B(0,R), R in {0.1, 0.2, 0.4, 0.8}; tail cut at L".into(),
            balls: "none".into(),
            ..Default::default()
        },
        vec![positive("tail lower bound", levels, raw, ctx.cfg.drift_tol, None)],
    ))
}

/// The radii of the `M_ρ χ_{B(0,r)}` lower-bound check.
pub fn lemma_5_5_radii() -> Vec<f64> {
    (0..10).map(|k| 0.1 * 2f64.powf(k as f64 / 2.0)).collect()
}

/// `max_r max_{x ∈ B(0,r)} sup_{t≤r}ρ(t) / M_ρχ_{B(0,r)}(x)` over [`lemma_5_5_radii`], with
/// a family of radii `h·2^{k/32}` plus the test radii.
pub fn lemma_5_5_ratio(rho: &KernelFunction, grid: Grid) -> Result<f64, HarnessError> {
    let radii: Vec<f64> = lemma_5_5_radii().iter().map(|&r| snap_radius(r, grid.h)).collect();
    let mut fam_radii = BallFamily::geometric_radii(grid.h, 2f64.powf(1.0 / 32.0), 0)?;
    let top = 2.0 * grid.half_width;
    let mut r = grid.h;
    while r <= top {
        fam_radii.push(r);
        r *= 2f64.powf(1.0 / 32.0);
    }
    fam_radii.extend(radii.iter().copied());
    fam_radii.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    fam_radii.dedup();
    let fam = BallFamily::new(&grid, BallFamily::lattice_centers(&grid, 1), fam_radii)?;
    let vals = par::map_slice(&radii, |&r| -> Result<f64, HarnessError> {
        let chi = chi_centered(grid, r);
        let m = frac_maximal(&chi, rho, &fam)?.field;
        let s = sup_rho_below(rho, r);
        Ok((0..grid.side).filter(|&k| chi.values[k] > 0.0).map(|k| s / m.values[k]).fold(0.0, f64::max))
    });
    Ok(vals.into_iter().collect::<Result<Vec<_>, _>>()?.into_iter().fold(0.0, f64::max))
}

fn lem_5_5(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let mut subs = Vec::new();
    let levels = ctx.cfg.levels(2).iter().map(|h| h / 2.0).collect::<Vec<_>>();
    for rho in [KernelFunction::power(0.25), KernelFunction::log_kernel(0.5), KernelFunction::bessel_type(0.5)] {
        let raw = levels
            .iter()
            .map(|&h| lemma_5_5_ratio(&rho, ctx.cfg.grid(h)))
            .collect::<Result<Vec<_>, _>>()?;
        subs.push(fixed(&format!("sup rho <= M_rho chi, {}", rho.label()), levels.clone(), raw, 1.0, 0.02));
    }
    Ok(PropertyCase::new(
        "LEM_5_5",
        "sup_{t<=r} rho(t) chi_B(0,r) <= M_rho chi_B(0,r)",
        CaseInputs {
            kernel: Some("power(0.25), log_kernel(0.5), bessel_type(0.5)".into()),
            fields: "indicators of B(0,r), r = 0.1*2^(k/2), k = 0..9".into(),
            balls: "all centres, radii h*2^(k/32) plus the test radii".into(),
            ..Default::default()
        },
        subs,
    ))
}

fn lem_5_6(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let (levels, raw) = ctx.two_levels(|f, g| {
        let m = maximal(f)?;
        let top = m.sup_abs();
        if top == 0.0 {
            return Ok(0.0);
        }
        let mut worst = 0.0f64;
        let mut t = top;
        while t > top * 1e-3 {
            let lhs = m.values.iter().filter(|&&v| v > t).count() as f64 * g.h;
            let rhs = f.values.iter().filter(|v| v.abs() > t / 2.0).map(|v| v.abs()).sum::<f64>() * g.h / t;
            if lhs > 0.0 {
                worst = worst.max(if rhs == 0.0 { f64::INFINITY } else { lhs / rhs });
            }
            t /= FIT_STEP;
        }
        Ok(worst)
    })?;
    Ok(PropertyCase::new(
        "LEM_5_6",
        "m(Mf,t) <= (C/t) int_{|f|>t/2} |f|",
        CaseInputs {
            fields: ctx.corpus_desc(),
            balls: "all centres, radii h*2^(k/2); t on 2^(-k/4) sup Mf".into(),
            ..Default::default()
        },
        vec![positive("corpus", levels, raw, ctx.cfg.drift_tol, None)],
    ))
}

// ---------------------------------------------------------------------------------------
// Young-function identities

/// `{0}` and 400 log-spaced points in `[1e-8, 1e8]`.
pub fn sandwich_grid() -> Vec<f64> {
    let mut u = vec![0.0];
    u.extend(LogGrid::new(1e-8, 1e8, 400).values());
    u
}

/// Largest relative violation of `Φ(Φ⁻¹(u)) ≤ u ≤ Φ⁻¹(Φ(u))`, and of the equality
/// `Φ(Φ⁻¹(u)) = u` for 𝒴⁽¹⁾/𝒴⁽²⁾ members. A left-side miss counts only when it is not
/// explained by the spacing of floats at `t = Φ⁻¹(u)`: near a threshold `Φ` is too steep
/// relative to `u` for `t` to carry `u` to 1e-9.
pub fn sandwich_violation(phi: &YoungFunction) -> (f64, f64) {
    let exact = matches!(phi.classify(), YClass::Y1 | YClass::Y2);
    let mut ineq = 0.0f64;
    let mut eq = 0.0f64;
    for u in sandwich_grid() {
        let (l, r) = sandwich_excess(phi, u);
        ineq = ineq.max(r);
        let t = phi.inverse(u);
        let bracketed = t.is_finite() && t > 0.0 && phi.eval(t.next_down()) <= u && u <= phi.eval(t.next_up());
        if l > 1e-9 && !bracketed {
            ineq = ineq.max(l);
        }
        if exact && u > 0.0 {
            let e = (phi.eval(t) - u).abs() / u;
            if e > 1e-9 && !bracketed {
                eq = eq.max(e);
            }
        }
    }
    (ineq, eq)
}

fn eq_2_6() -> Result<PropertyCase, HarnessError> {
    let subs = YoungFunction::catalog()
        .iter()
        .map(|phi| {
            let (ineq, eq) = sandwich_violation(phi);
            fixed(&format!("sandwich {}", phi.label()), vec![], vec![1.0 + ineq.max(eq)], 1.0, 1e-9)
        })
        .collect();
    Ok(PropertyCase::new(
        "EQ_2_6",
        "Phi(Phi^-1(u)) <= u <= Phi^-1(Phi(u))",
        CaseInputs {
            phi: Some("catalog".into()),
            fields: "none".into(),
            balls: "none; u in {0} and 400 points of [1e-8, 1e8]".into(),
            ..Default::default()
        },
        subs,
    ))
}

/// Seeded step fields on `[-2, 2]` with `h = 0.01`, one catalog member each, on the ball
/// `B(0, 1.005)`: largest relative disagreement among the three sups.
pub fn weak_identity_spread(count: usize, seed: u64) -> Result<f64, HarnessError> {
    let g = Grid::new(1, 2.0, 0.01)?;
    let ball = Ball::centered(&g, 1.005)?;
    let cat = YoungFunction::catalog();
    let specs = corpus::step_fields(count, seed);
    let mut worst = 0.0f64;
    for (k, spec) in specs.iter().enumerate() {
        let f = spec.sample(g);
        let id = weak_type_identity(&f, &cat[k % cat.len()], &ball);
        let spread = |a: f64, b: f64| if a == b { 0.0 } else { (a - b).abs() / a.abs().max(b.abs()) };
        worst = worst.max(spread(id.s1, id.s2)).max(spread(id.s2, id.s3)).max(spread(id.s1, id.s3));
    }
    Ok(worst)
}

fn eq_2_8(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let spread = weak_identity_spread(100, ctx.cfg.seed)?;
    Ok(PropertyCase::new(
        "EQ_2_8",
        "sup Phi(t)m(f,t) = sup t m(f,Phi^-1(t)) = sup t m(Phi(|f|),t)",
        CaseInputs {
            phi: Some("catalog, cycled".into()),
            fields: format!("100 seeded step fields (seed {})", ctx.cfg.seed),
            balls: "B(0, 1.005) on h = 0.01".into(),
            ..Default::default()
        },
        vec![fixed("three sups agree", vec![0.01], vec![1.0 + spread], 1.0, 1e-9)],
    ))
}

/// `min` and `max` of `Φ⁻¹(t)Φ̃⁻¹(t)/t` over 400 points of `[1e-6, 1e6]`.
pub fn pair_ratio_range(phi: &YoungFunction) -> (f64, f64) {
    let tilde = phi.complementary();
    LogGrid::new(1e-6, 1e6, 400)
        .values()
        .iter()
        .map(|&t| pair_product_ratio(phi, &tilde, t))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn eq_4_1() -> Result<PropertyCase, HarnessError> {
    let mut subs = Vec::new();
    for phi in YoungFunction::catalog() {
        let (lo, hi) = pair_ratio_range(&phi);
        let mut s = fixed(&format!("pair {}", phi.label()), vec![], vec![hi], 2.0, 1e-6);
        s.pass &= lo >= 1.0 - 1e-6;
        s.detail = format!("ratio in [{lo}, {hi}]");
        subs.push(s);
    }
    Ok(PropertyCase::new(
        "EQ_4_1",
        "t <= Phi^-1(t) Phi~^-1(t) <= 2t",
        CaseInputs {
            phi: Some("catalog with complements".into()),
            fields: "none".into(),
            balls: "none; t in 400 points of [1e-6, 1e6]".into(),
            ..Default::default()
        },
        subs,
    ))
}

/// `count` seeded pairs `(f, g)` on `[-2, 2]`, `h = 0.01`, with catalog members cycled and
/// a seeded ball each: largest `lhs/rhs` of the pairing bound.
pub fn holder_worst(count: usize, seed: u64) -> Result<f64, HarnessError> {
    use rand::{Rng, SeedableRng};
    let g = Grid::new(1, 2.0, 0.01)?;
    let fs = corpus::generate(count, 1, seed);
    let gs = corpus::generate(count, 1, seed.wrapping_add(1));
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed.wrapping_add(2));
    let balls: Vec<Ball> = (0..count)
        .map(|_| {
            let c = rng.gen_range(-1.0..1.0);
            let r = rng.gen_range(0.05..1.5);
            Ball::new(&g, [g.axis_index(c), 0], r)
        })
        .collect::<Result<_, _>>()?;
    let cat = YoungFunction::catalog();
    let w = weight_r_inv();
    let ratios = par::map_range(count, |k| {
        let phi = &cat[k % cat.len()];
        let rep = holder_pairing(&fs[k].sample(g), &gs[k].sample(g), phi, &phi.complementary(), &w, &balls[k]);
        if rep.lhs == 0.0 {
            0.0
        } else {
            rep.lhs / rep.rhs
        }
    });
    Ok(ratios.into_iter().fold(0.0, f64::max))
}

fn eq_4_3(ctx: &Context) -> Result<PropertyCase, HarnessError> {
    let worst = holder_worst(200, ctx.cfg.seed)?;
    Ok(PropertyCase::new(
        "EQ_4_3",
        "(1/(|B|phi(r))) int_B |fg| <= 2 |f|_{Phi,phi,B} |g|_{Phi~,phi,B}",
        CaseInputs {
            phi: Some("catalog, cycled".into()),
            weight: Some(weight_r_inv().label()),
            fields: format!("200 seeded pairs (seed {})", ctx.cfg.seed),
            balls: "one seeded ball per pair".into(),
            ..Default::default()
        },
        vec![fixed("pairing with factor 2", vec![0.01], vec![worst], 2.0, 1e-6)],
    ))
}
