//! Theory functions against closed forms and structural identities.

use hlgt::theory::{
    alpha0, alpha1, alpha1_over_alpha0, alpha3, alpha4, alpha5, alpha6, alphas_z2, assumption_a,
    assumption_a_lhs, assumption_a_threshold, k, main_bound, theta, theta_coordination, theta_prime, theta_z2,
};
use proptest::prelude::*;

proptest! {
    #[test]
    fn z2_theta_matches_closed_form(beta in 0.0f64..3.0, kappa in 0.0f64..3.0, g in 0u8..2) {
        prop_assert!((theta(beta, kappa, g, 2).re - theta_z2(beta, kappa, g)).abs() < 1e-12);
        prop_assert!(theta(beta, kappa, g, 2).im.abs() < 1e-15);
    }

    #[test]
    fn z2_alphas_match_closed_forms(beta in 0.0f64..2.0, kappa in 0.0f64..2.0) {
        let z = alphas_z2(beta, kappa);
        prop_assert!((alpha0(beta, 2) - z.alpha0_beta).abs() < 1e-14);
        prop_assert!((alpha0(kappa, 2) - z.alpha0_kappa).abs() < 1e-14);
        prop_assert!((alpha3(beta, kappa, 2) - z.alpha3).abs() < 1e-12);
        prop_assert!((alpha4(beta, kappa, 2) - z.alpha4).abs() < 1e-12);
        prop_assert!((alpha5(beta, kappa, 2).unwrap() - z.alpha5).abs() < 1e-12);
        prop_assert!((alpha6(beta, kappa, 2) - z.alpha6).abs() < 1e-12);
    }

    #[test]
    fn theta_is_a_mean_of_unit_phases(beta in 0.0f64..2.0, kappa in 0.0f64..2.0, g in 0u8..7, n in 2u8..8, c in 0usize..7) {
        let t = theta_coordination(beta, kappa, g % n, n, c);
        prop_assert!(t.norm() <= 1.0 + 1e-12);
        let mirror = theta_coordination(beta, kappa, (n - g % n) % n, n, c);
        prop_assert!((t.conj() - mirror).norm() < 1e-12);
    }

    #[test]
    fn alpha_ratio_is_consistent(r in 0.01f64..5.0, n in 2u8..9) {
        prop_assert!((alpha1(r, n) / alpha0(r, n) - alpha1_over_alpha0(r, n)).abs() < 1e-12);
        prop_assert!(alpha1(r, n) <= alpha0(r, n));
    }

    #[test]
    fn k_is_finite_exactly_under_the_assumption(kappa in 0.5f64..3.0) {
        prop_assert_eq!(k(kappa, 2).is_ok(), assumption_a(kappa, 2));
    }

    #[test]
    fn theta_prime_is_a_probability_like_factor(supp in 1usize..100, beta in 0.0f64..2.0, kappa in 0.0f64..2.0, c in 0.0f64..1.0) {
        let t = theta_prime(supp, beta, kappa, c, 2).unwrap();
        prop_assert!((0.0..=1.0).contains(&t));
    }
}

#[test]
fn infinite_coupling_limits() {
    assert_eq!(alpha0(f64::INFINITY, 3), 0.0);
    assert!((theta(f64::INFINITY, 1.0, 0, 2).re - 1.0).abs() < 1e-15);
    assert!((theta(f64::INFINITY, 1.0, 1, 2).re - 1.0).abs() < 1e-15);
    assert_eq!(alpha1_over_alpha0(f64::INFINITY, 4), 0.5);
}

#[test]
fn assumption_threshold_is_a_root() {
    for n in [2u8, 3, 4, 6] {
        let t = assumption_a_threshold(n).unwrap();
        assert!((assumption_a_lhs(t, n) - 1.0).abs() < 1e-8);
        assert!(!assumption_a(t - 1e-6, n) && assumption_a(t + 1e-6, n));
    }
    let z2 = assumption_a_threshold(2).unwrap();
    let closed = -0.25 * ((1.0 + 1.0 / 324.0f64).sqrt() - 1.0).ln();
    assert!((z2 - closed).abs() < 1e-9, "{z2} vs {closed}");
}

#[test]
fn envelope_preconditions() {
    assert!(main_bound(24, 7, 8, 1.0, 1.7).is_err());
    assert!(main_bound(23, 8, 8, 1.0, 1.7).is_err());
    assert!(main_bound(32, 8, 8, 1.0, 1.0).is_err());
    assert!(main_bound(32, 8, 8, 0.2, 1.7).is_err());
    let env = main_bound(32, 8, 8, 1.0, 1.7).unwrap();
    assert!(env.vacuous && env.excludes_o_kappa);
}
