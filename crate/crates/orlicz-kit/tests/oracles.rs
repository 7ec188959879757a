//! End-to-end frozen values through the public API. Each oracle was derived by hand
//! before the corresponding code ran.

use approx::assert_relative_eq;

use orlicz_kit::criteria::{check_weight_integral, eval_ir_a, solve_adams_exponent, Verdict};
use orlicz_kit::fields_norms::{ball_norm, distribution, global_norm, Ball, BallFamily, Grid, SampledField};
use orlicz_kit::grids::LogGrid;
use orlicz_kit::operators::{frac_integral, hl_maximal};
use orlicz_kit::weights_kernels::{check_int_rho, KernelFunction, WeightFunction};
use orlicz_kit::young_calc::{YClass, YoungFunction};

fn chi(g: Grid, r: f64) -> SampledField {
    SampledField::from_fn(g, |x| if x[0].abs() <= r + 1e-12 { 1.0 } else { 0.0 })
}

#[test]
fn young_thresholds_inverses_and_classes() {
    assert_eq!(YoungFunction::CappedLinear.thresholds(), (0.0, 1.0));
    assert_eq!(YoungFunction::ShiftedSquare.thresholds(), (2.0, f64::INFINITY));
    assert_eq!(YoungFunction::CappedLinear.inverse(0.5), 0.5);
    assert_eq!(YoungFunction::CappedLinear.inverse(7.0), 1.0);
    assert_relative_eq!(YoungFunction::ShiftedSquare.inverse(5.0), 3.0, max_relative = 1e-12);
    assert_eq!(YoungFunction::CappedLinear.classify(), YClass::Y3);
}

#[test]
fn distribution_of_abs_x() {
    // {0.5 < |x| ≤ 1} has measure 1
    let g = Grid::new(1, 1.0, 0.01).unwrap();
    let f = SampledField::from_fn(g, |x| x[0].abs());
    assert!((distribution(&f, None, 0.5) - 1.0).abs() <= g.h);
}

#[test]
fn constant_field_ball_norm() {
    // (c/λ)^p / φ(r) = 1 gives λ = c φ(r)^{-1/p}
    let g = Grid::new(1, 2.0, 0.01).unwrap();
    let f = SampledField::from_fn(g, |_| 3.0);
    let ball = Ball::centered(&g, 0.505).unwrap();
    let w = WeightFunction::Power { lambda: -1.0 };
    let n = ball_norm(&f, &YoungFunction::Power { p: 2.0 }, &w, &ball, false);
    assert_relative_eq!(n, 3.0 * (1.0 / 0.505f64).powf(-0.5), max_relative = 1e-9);
}

#[test]
fn indicator_global_norm_sits_in_the_sandwich() {
    // the centred ball alone gives 1/Φ⁻¹(φ(1)) = 1; the pair bound caps the sup at 2
    let g = Grid::new(1, 4.0, 0.01).unwrap();
    let f = chi(g, 1.0);
    let fam = BallFamily::standard(&g, 1.005, 2f64.sqrt()).unwrap();
    let n = global_norm(&f, &YoungFunction::Power { p: 2.0 }, &WeightFunction::Power { lambda: -1.0 }, &fam, false);
    assert!(n.value >= 1.0 - 1e-9 && n.value <= 2.0, "{n:?}");
}

#[test]
fn maximal_of_indicator_at_two() {
    let g = Grid::new(1, 4.0, 0.01).unwrap();
    let fam = BallFamily::standard(&g, g.h, 2f64.powf(1.0 / 16.0)).unwrap();
    let m = hl_maximal(&chi(g, 1.0), &fam).unwrap().field;
    let v = m.values[g.axis_index(2.0)];
    assert!((v / (2.0 / 3.0) - 1.0).abs() < 0.03, "{v}");
}

#[test]
fn riesz_unit_kernel_at_origin() {
    // ρ(t)/t ≡ 1: the exact integral over [-1, 1] is 2
    let g = Grid::new(1, 2.0, 0.005).unwrap();
    let out = frac_integral(&chi(g, 1.0), &KernelFunction::power(1.0)).unwrap().field;
    assert_relative_eq!(out.values[g.axis_index(0.0)], 2.0, max_relative = 2.0 * g.h);
}

#[test]
fn log_kernel_integrability() {
    let r = check_int_rho(&KernelFunction::log_kernel(1.0));
    assert!(r.finite);
    assert_relative_eq!(r.value, 2.0, max_relative = 1e-7);
}

#[test]
fn adams_tuple() {
    assert_eq!(solve_adams_exponent(2.0, 0.25, -1.0, 1).unwrap(), 4.0);
    let rep = eval_ir_a(
        &YoungFunction::Power { p: 2.0 },
        &YoungFunction::Power { p: 4.0 },
        &WeightFunction::Power { lambda: -1.0 },
        &KernelFunction::power(0.25),
        &LogGrid::default_r(),
    )
    .unwrap();
    assert_eq!(rep.verdict, Verdict::Holds);
    // 1/α + 1/(n/p − α) = 4 + 4
    for v in rep.ratios() {
        assert_relative_eq!(v, 8.0, max_relative = 1e-6);
    }
}

#[test]
fn weight_integral_power_case() {
    // ∫₀^r t^{λ} dt = r^{1+λ}/(1+λ): C = 1/(1+λ) = 2 for λ = −1/2
    let rep = check_weight_integral(&WeightFunction::Power { lambda: -0.5 }, 1, &LogGrid::default_r());
    assert_eq!(rep.verdict, Verdict::Holds);
    assert_relative_eq!(rep.ratio_sup, 2.0, max_relative = 1e-6);
    let fail = check_weight_integral(&WeightFunction::Power { lambda: -1.0 }, 1, &LogGrid::default_r());
    assert_eq!(fail.verdict, Verdict::Fails);
}
