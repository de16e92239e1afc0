mod common;

use common::*;
use nlstw::{Axis, ComplexField, Grid};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(6.0, 8.0, 32, 48).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval(coeffs in coeff_strategy(8), bumps in prop::collection::vec(bump_strategy(0.5, -3.0..3.0, 0.8..1.6), 1..4)) {
        let g = grid();
        prop_assert!(parseval_defect(&trig_field(&g, &coeffs)) < 1e-12);
        prop_assert!(parseval_defect(&bump_field(&g, &bumps)) < 1e-12);
    }

    #[test]
    fn integration_by_parts(a in coeff_strategy(8), b in coeff_strategy(8)) {
        let g = grid();
        let f = real_trig_field(&g, &a);
        let h = real_trig_field(&g, &b);
        for axis in [Axis::X1, Axis::X2] {
            prop_assert!(by_parts_defect(&f, &h, axis) < 1e-10);
        }
    }

    #[test]
    fn mixed_partials_commute(a in coeff_strategy(10)) {
        let f = real_trig_field(&grid(), &a);
        prop_assert!(mixed_partial_defect(&f) < 1e-10);
    }

    #[test]
    fn derivative_is_linear(a in coeff_strategy(6), b in coeff_strategy(6), s in -3.0..3.0f64, k in -2.0..2.0f64) {
        let g = grid();
        let f = trig_field(&g, &a);
        let h = trig_field(&g, &b);
        let shifted = f.axpy(s, &h).map(|z| z + Complex64::new(k, -k));
        let lhs = shifted.derivative(Axis::X1);
        let rhs = f.derivative(Axis::X1).axpy(s, &h.derivative(Axis::X1));
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * (1.0 + rhs.norm_l2()));
    }

    #[test]
    fn antiderivative_inverts_derivative(a in coeff_strategy(8)) {
        let f = real_trig_field(&grid(), &a).derivative(Axis::X1);
        let back = f.antiderivative_x(1e-10).unwrap().derivative(Axis::X1);
        let err = back.zip_map(&f, |x, y| x - y).max_abs();
        prop_assert!(err < 1e-12 * (1.0 + f.max_abs()), "{err}");
    }

    #[test]
    fn dilations_compose(
        bumps in prop::collection::vec(bump_strategy(0.4, -1.0..1.0, 0.6..1.0), 1..3),
        l in 0.8..1.25f64, s in 0.8..1.25f64, l2 in 0.8..1.25f64, s2 in 0.8..1.25f64,
    ) {
        let g = Grid::square(12.0, 64).unwrap();
        let psi = bump_field(&g, &bumps);
        let twice = psi.dilate(l, s).unwrap().dilate(l2, s2).unwrap();
        let once = psi.dilate(l * l2, s * s2).unwrap();
        prop_assert!(twice.max_abs_diff(&once) < 1e-8);
    }

    #[test]
    fn resample_preserves_band_limited(a in coeff_strategy(6)) {
        let g = grid();
        let f = trig_field(&g, &a);
        let fine = Grid::new(6.0, 8.0, 64, 96).unwrap();
        let up = f.resample(&fine);
        let exact = trig_field(&fine, &a);
        prop_assert!(up.max_abs_diff(&exact) < 1e-12);
        prop_assert!(up.resample(&g).max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn roll_is_invertible(a in coeff_strategy(4), s1 in -40isize..40, s2 in -40isize..40) {
        let f = trig_field(&grid(), &a);
        prop_assert_eq!(f.roll(s1, s2).roll(-s1, -s2), f);
    }
}

#[test]
fn real_spectrum_inverts_to_real() {
    let g = grid();
    let f = real_trig_field(&g, &[(1, 1, 0.3, -0.2), (2, -3, 0.1, 0.4)]);
    let back: ComplexField = f.spectrum().inverse();
    assert!(back.values().iter().all(|z| z.im.abs() < 1e-14));
}
