mod common;

use common::*;
use nlstw::diagnostics::lc_symbol;
use nlstw::physics::Nonlinearity;
use nlstw::Grid;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn multiplier_residual_is_translation_invariant(
        b in prop::collection::vec(bump_strategy(0.3, -2.0..2.0, 0.8..1.5), 1..4),
        c in 0.2..1.3f64, s1 in -20isize..20, s2 in -20isize..20,
    ) {
        let psi = bump_field(&Grid::square(8.0, 48).unwrap(), &b);
        for nl in [Nonlinearity::GrossPitaevskii, Nonlinearity::cubic_quintic(3.0).unwrap()] {
            prop_assert!(translation_defect(&psi, &nl, c, s1, s2) < 1e-8);
        }
    }

    #[test]
    fn transverse_symbol_is_bounded(xi1 in -50.0..50.0f64, xi2 in -50.0..50.0f64, c in 0.0..1.414f64) {
        let vs = 2f64.sqrt();
        let r2 = xi1 * xi1 + xi2 * xi2;
        prop_assume!(r2 > 1e-8);
        let l = lc_symbol(xi1, xi2, c, vs);
        prop_assert!(l > 0.0);
        prop_assert!(xi2 * xi2 / r2 * l <= 1.0 / (vs * vs) * (1.0 + 1e-12));
    }
}
