mod common;

use common::{any_state, grid, mixed_state, pure_state};
use fockloss::loss::apply_loss;
use fockloss::purity::{
    appendix_a_purity, lossy_purity, mutual_information_bs, overlap_polynomial, purity, purity_polynomial, renyi_entropy, von_neumann,
};
use proptest::prelude::*;

/// Second central difference with step `h`.
fn second_difference(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    f(t + h) - 2.0 * f(t) + f(t - h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pure_purity_is_symmetric_and_convex(psi in pure_state(12)) {
        let poly = purity_polynomial(&psi.to_density());
        for t in grid(0.0, 1.0, 21) {
            prop_assert!((poly.evaluate(t) - poly.evaluate(1.0 - t)).abs() <= 1e-10);
        }
        for t in grid(-1.0, 2.0, 31) {
            prop_assert!(poly.derivative(t, 2) >= -1e-9);
        }
        prop_assert!(poly.max_odd_abs() <= 1e-10);
    }

    #[test]
    fn dark_port_coefficients_are_nonnegative(rho in any_state(8), sigma in any_state(8)) {
        let poly = overlap_polynomial(&rho, &sigma);
        prop_assert!(poly.min_coefficient() >= -1e-10);
        let own = purity_polynomial(&rho);
        // λ = 1 is T = 0 (vacuum, purity 1); λ = -1 is T = 1
        prop_assert!((own.total() - 1.0).abs() < 1e-12);
        prop_assert!((own.evaluate(1.0) - purity(&rho)).abs() < 1e-12);
        prop_assert!(own.min_coefficient() >= -1e-10);
    }

    #[test]
    fn polynomial_matches_direct_routes(rho in any_state(8), t in 0.0f64..=1.0) {
        let poly = purity_polynomial(&rho);
        let direct = lossy_purity(&rho, t).unwrap();
        prop_assert!((poly.evaluate(t) - direct).abs() < 1e-12);
        prop_assert!((appendix_a_purity(&rho, t) - direct).abs() < 1e-12);
    }

    #[test]
    fn overlap_decreases_convexly_past_half_loss(rho in mixed_state(8), sigma in mixed_state(8)) {
        let poly = overlap_polynomial(&rho, &sigma);
        for t in grid(0.0, 0.5, 11) {
            prop_assert!(poly.derivative(t, 1) <= 1e-10);
            prop_assert!(poly.derivative(t, 2) >= -1e-10);
        }
    }

    #[test]
    fn renyi_two_is_log_purity(rho in any_state(8), t in 0.0f64..=1.0) {
        let r = apply_loss(&rho, t).unwrap();
        prop_assert!((renyi_entropy(&r, 2.0).unwrap() + purity(&r).ln()).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn entropy_is_concave_under_loss(rho in mixed_state(6)) {
        let h = 1e-2;
        let f = |t: f64| von_neumann(&apply_loss(&rho, t).unwrap()).unwrap();
        for t in grid(0.05, 0.95, 19) {
            prop_assert!(second_difference(f, t, h) <= 1e-7);
        }
    }

    #[test]
    fn mutual_information_is_concave(rho in mixed_state(4)) {
        let h = 1e-2;
        let f = |t: f64| mutual_information_bs(&rho, t).unwrap();
        for t in grid(0.05, 0.95, 10) {
            prop_assert!(second_difference(f, t, h) <= 1e-7);
        }
    }
}
