mod common;

use common::*;
use nlstw::physics::{self, Nonlinearity, DEFAULT_DELTA_MIN};
use nlstw::Grid;
use proptest::prelude::*;

fn nonlinearities() -> [Nonlinearity; 2] {
    [Nonlinearity::GrossPitaevskii, Nonlinearity::cubic_quintic(3.0).unwrap()]
}

fn bumps() -> impl Strategy<Value = Vec<Bump>> {
    prop::collection::vec(bump_strategy(0.4, -2.0..2.0, 0.8..1.5), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn energy_gradient_matches_centered_difference(psi in bumps(), phi in bumps()) {
        let g = Grid::square(8.0, 48).unwrap();
        let psi = bump_field(&g, &psi);
        let phi = bump_field(&g, &phi).map(|z| z - 1.0);
        for nl in nonlinearities() {
            let (e3, e4, scale) = energy_fd_errors(&psi, &phi, &nl);
            // O(t^2) until round-off
            prop_assert!(e4 <= (e3 / 50.0).max(1e-8 * (1.0 + scale)), "{e3:e} {e4:e}");
            prop_assert!(e3 < 1e-4 * (1.0 + scale));
        }
    }

    #[test]
    fn momentum_gradient_matches_centered_difference(psi in bumps(), phi in bumps()) {
        let g = Grid::square(8.0, 48).unwrap();
        let psi = bump_field(&g, &psi);
        let phi = bump_field(&g, &phi).map(|z| z - 1.0);
        let (err, scale) = momentum_fd_error(&psi, &phi);
        prop_assert!(err < 1e-9 * (1.0 + scale));
    }

    #[test]
    fn reflections_split_energy_and_momentum(
        upper in prop::collection::vec(bump_strategy(0.4, 4.5..5.5, 0.6..0.7), 1..3),
        lower in prop::collection::vec(bump_strategy(0.4, -5.5..-4.5, 0.6..0.7), 1..3),
    ) {
        // bumps vanish to round-off near x2 = 0 and x2 = +-L
        let g = Grid::square(12.0, 128).unwrap();
        let psi = bump_field(&g, &[upper, lower].concat());
        for nl in nonlinearities() {
            let (e, q) = reflection_defects(&psi, &nl);
            prop_assert!(e < 1e-10, "E {e:e}");
            prop_assert!(q < 1e-10, "Q {q:e}");
        }
    }

    #[test]
    fn dilation_laws(b in bumps(), l in 0.7..1.4f64, s in 0.7..1.4f64) {
        let g = Grid::square(12.0, 64).unwrap();
        let psi = bump_field(&g, &b);
        for nl in nonlinearities() {
            for d in dilation_defects(&psi, &nl, l, s) {
                prop_assert!(d < 1e-8, "{d:e}");
            }
        }
    }

    #[test]
    fn momentum_flips_under_x1_reflection(b in bumps()) {
        let psi = bump_field(&Grid::square(8.0, 48).unwrap(), &b);
        let q = physics::momentum(&psi);
        prop_assert!((physics::momentum(&psi.flip_x1()) + q).abs() < 1e-12 * (1.0 + q.abs()));
        let nl = Nonlinearity::GrossPitaevskii;
        prop_assert!(rel(physics::energy(&psi.flip_x1(), &nl), physics::energy(&psi, &nl)) < 1e-12);
    }

    #[test]
    fn lifted_momentum_agrees(b in prop::collection::vec(bump_strategy(0.25, -2.0..2.0, 0.8..1.5), 1..4)) {
        let psi = bump_field(&Grid::square(8.0, 128).unwrap(), &b);
        let lifting = physics::lift(&psi, DEFAULT_DELTA_MIN).unwrap();
        let q = physics::momentum(&psi);
        prop_assert!((lifting.momentum() - q).abs() < 1e-8 * (1.0 + q.abs()));
        prop_assert!(lifting.to_field().max_abs_diff(&psi) < 1e-10 * (1.0 + psi.max_modulus()));
    }

    #[test]
    fn gp_energy_is_gl_energy_below_two(b in bumps()) {
        let psi = bump_field(&Grid::square(8.0, 48).unwrap(), &b);
        prop_assume!(psi.max_modulus() <= 2.0);
        let e = physics::energy(&psi, &Nonlinearity::GrossPitaevskii);
        prop_assert!(rel(e, physics::gl_energy(&psi)) < 1e-13);
    }

    #[test]
    fn functional_combinations(b in bumps(), c in 0.0..1.4f64) {
        let psi = bump_field(&Grid::square(8.0, 48).unwrap(), &b);
        for nl in nonlinearities() {
            let e = physics::energy(&psi, &nl);
            let q = physics::momentum(&psi);
            let k = physics::kinetic(&psi);
            let i = physics::functional_i(&psi, &nl);
            prop_assert!((i - (e - q - k)).abs() < 1e-12 * (1.0 + e.abs()));
            let ec = physics::action_ec(&psi, &nl, c);
            let a = physics::a_functional(&psi);
            prop_assert!((ec - a - physics::b_c(&psi, &nl, c)).abs() < 1e-12 * (1.0 + ec.abs()));
        }
    }
}
