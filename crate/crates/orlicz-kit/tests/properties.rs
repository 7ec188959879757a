use proptest::prelude::*;

use orlicz_kit::fields_norms::{luxemburg_norm, Ball, BallFamily, Grid, SampledField};
use orlicz_kit::io::{read_field, write_field};
use orlicz_kit::operators::hl_maximal;
use orlicz_kit::weights_kernels::WeightFunction;
use orlicz_kit::young_calc::YoungFunction;

const SIDE: usize = 41;

fn grid() -> Grid {
    Grid::new(1, 1.0, 0.05).unwrap()
}

fn field() -> impl Strategy<Value = SampledField> {
    prop::collection::vec(-5.0f64..5.0, SIDE).prop_map(|v| SampledField::new(grid(), v).unwrap())
}

fn maximal(f: &SampledField) -> SampledField {
    hl_maximal(f, &BallFamily::half_octave(&f.grid)).unwrap().field
}

fn catalog_member() -> impl Strategy<Value = YoungFunction> {
    (0..7usize).prop_map(|k| YoungFunction::catalog()[k].clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn maximal_dominates_the_field(f in field()) {
        let m = maximal(&f);
        for (mv, fv) in m.values.iter().zip(&f.values) {
            prop_assert!(*mv >= fv.abs() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn maximal_is_sublinear(f in field(), g in field()) {
        let (mf, mg) = (maximal(&f), maximal(&g));
        let msum = maximal(&f.zip_with(&g, |a, b| a + b));
        for i in 0..SIDE {
            prop_assert!(msum.values[i] <= (mf.values[i] + mg.values[i]) * (1.0 + 1e-12) + 1e-12);
        }
    }

    #[test]
    fn maximal_is_monotone(f in field(), bump in prop::collection::vec(0.0f64..3.0, SIDE)) {
        let a = f.abs();
        let b = SampledField::new(grid(), a.values.iter().zip(&bump).map(|(x, d)| x + d).collect()).unwrap();
        let (ma, mb) = (maximal(&a), maximal(&b));
        for i in 0..SIDE {
            prop_assert!(ma.values[i] <= mb.values[i] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn inverse_sandwich(phi in catalog_member(), e in -6.0f64..6.0) {
        let u = 10f64.powf(e);
        let t = phi.inverse(u);
        // near the threshold of shifted_square no float t carries u to 1e-9: then t must
        // be the float at which Φ crosses u
        let bracketed = phi.eval(t.next_down()) <= u && u <= phi.eval(t.next_up());
        prop_assert!(phi.eval(t) <= u * (1.0 + 1e-9) || bracketed);
        let s = 10f64.powf(e / 3.0);
        prop_assert!(s <= phi.inverse(phi.eval(s)) * (1.0 + 1e-9));
    }

    #[test]
    fn inverse_at_double_is_at_most_double(phi in catalog_member(), e in -6.0f64..6.0) {
        let u = 10f64.powf(e);
        prop_assert!(phi.inverse(2.0 * u) <= 2.0 * phi.inverse(u) * (1.0 + 1e-12));
    }

    #[test]
    fn norm_is_homogeneous(f in field(), c in 0.01f64..100.0, p in 1.0f64..4.0) {
        let phi = YoungFunction::Power { p };
        let w = WeightFunction::Power { lambda: -1.0 };
        let ball = Ball::centered(&grid(), 0.525).unwrap();
        let a = luxemburg_norm(&f.scale(c), &phi, &w, &ball);
        let b = c * luxemburg_norm(&f, &phi, &w, &ball);
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1e-300));
    }

    #[test]
    fn csv_round_trip(f in field()) {
        let mut buf = Vec::new();
        write_field(&f, &mut buf).unwrap();
        prop_assert_eq!(read_field(buf.as_slice()).unwrap(), f);
    }
}
