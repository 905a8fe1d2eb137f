//! Property tests for the cross-module invariants: parameter couplings,
//! semigroup structure, radial symmetry, budget reconstruction, active-set
//! characterization, and solver round-trips.

use heatchan_core::bisect::bisect_increasing;
use heatchan_core::filter::apply_spectral;
use heatchan_core::tf_plane::{
    distortion_integral, noise_profile, power_integral, solve_lambda, solve_nu, wvs, wvs_peak,
};
use heatchan_core::waterfill::{capacity_waterfill, rd_reverse_waterfill, source_energy};
use heatchan_core::FilterParams;

use proptest::prelude::*;

/// log-uniform DoF over (1.1, 1e4)
fn dof_strategy() -> impl Strategy<Value = f64> {
    (0.0..1.0f64).prop_map(|u| 1.1 * ((1e4f64 / 1.1).ln() * u).exp())
}

/// log-uniform aspect ratio over (0.01, 100)
fn aspect_strategy() -> impl Strategy<Value = f64> {
    (-2.0..2.0f64).prop_map(|e| 10f64.powf(e))
}

proptest! {
    #[test]
    fn parameter_couplings(ab in dof_strategy(), aspect in aspect_strategy()) {
        let p = FilterParams::from_dof(ab, aspect).unwrap();
        let ab_real = p.alpha() * p.beta();
        prop_assert!((1.0 / p.delta().tanh() / ab_real - 1.0).abs() < 1e-14);
        prop_assert!((p.rho() - (-p.delta()).exp()).abs() <= 2.0 * f64::EPSILON * p.rho());
        prop_assert!((p.gamma() * p.gamma() * p.beta() / p.alpha() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn spectral_semigroup(
        gamma in 0.1..10.0f64,
        d1 in 0.01..2.0f64,
        d2 in 0.01..2.0f64,
        coeffs in proptest::collection::vec(-10.0..10.0f64, 1..20),
    ) {
        let p1 = FilterParams::from_gamma_delta(gamma, d1).unwrap();
        let p2 = FilterParams::from_gamma_delta(gamma, d2).unwrap();
        let p12 = FilterParams::from_gamma_delta(gamma, d1 + d2).unwrap();
        let chained = apply_spectral(&p2, &apply_spectral(&p1, &coeffs));
        let direct = apply_spectral(&p12, &coeffs);
        for (a, b) in chained.iter().zip(&direct) {
            prop_assert!((a - b).abs() <= 1e-13 * b.abs().max(1e-300));
        }
    }

    #[test]
    fn surfaces_radial_in_scaled_coordinates(
        ab in dof_strategy(),
        aspect in aspect_strategy(),
        r2 in 0.0..20.0f64,
        frac in 0.0..1.0f64,
    ) {
        let p = FilterParams::from_dof(ab, aspect).unwrap();
        let (u, v) = ((frac * r2).sqrt(), ((1.0 - frac) * r2).sqrt());
        let (t, w) = (p.alpha() * u, p.beta() * v);
        let (t_ref, w_ref) = (p.alpha() * r2.sqrt(), 0.0);
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
        prop_assert!(close(p.weyl_symbol(t, w), p.weyl_symbol(t_ref, w_ref)));
        prop_assert!(close(noise_profile(&p, 0.4, t, w), noise_profile(&p, 0.4, t_ref, w_ref)));
        prop_assert!(close(wvs(&p, 1.7, t, w), wvs(&p, 1.7, t_ref, w_ref)));
    }

    #[test]
    fn capacity_budget_and_active_set(
        ab in dof_strategy(),
        s in 0.001..500.0f64,
        theta2 in 0.001..10.0f64,
    ) {
        let p = FilterParams::from_dof(ab, 1.0).unwrap();
        let sol = capacity_waterfill(&p, s, theta2, 1e-12).unwrap();
        // budget reconstruction
        prop_assert!((sol.budget_check - s).abs() <= 1e-10 * s);
        // allocations positive and strictly decreasing
        for w in sol.allocations.windows(2) {
            prop_assert!(w[0] > w[1] && w[1] > 0.0);
        }
        // K characterization: nu_{K-1}^2 < sigma^2 <= nu_K^2
        let k = sol.active_count;
        prop_assert!(theta2 / p.eigenvalue(k - 1) < sol.level);
        prop_assert!(sol.level <= theta2 / p.eigenvalue(k));
    }

    #[test]
    fn rd_budget_and_active_set(
        ab in dof_strategy(),
        frac in 0.0001..0.9999f64,
        sigma2 in 0.01..10.0f64,
    ) {
        let p = FilterParams::from_dof(ab, 1.0).unwrap();
        let d = frac * source_energy(&p, sigma2);
        let sol = rd_reverse_waterfill(&p, d, sigma2, 1e-12).unwrap();
        prop_assert!((sol.budget_check - d).abs() <= 1e-10 * d);
        // K characterization: sigma_{K-1}^2 > theta^2 >= sigma_K^2
        let k = sol.active_count;
        prop_assert!(k >= 1);
        prop_assert!(sigma2 * p.eigenvalue(k - 1) > sol.level);
        prop_assert!(sol.level >= sigma2 * p.eigenvalue(k));
    }

    #[test]
    fn parameter_solver_roundtrips(
        ab in dof_strategy(),
        s in 0.01..100.0f64,
        frac in 0.0001..1.0f64,
    ) {
        let p = FilterParams::from_dof(ab, 1.0).unwrap();
        let nu = solve_nu(&p, 0.05, s).unwrap();
        prop_assert!((power_integral(&p, 0.05, nu).value - s).abs() <= 1e-10 * s);
        let d = frac * source_energy(&p, 1.0);
        let lambda = solve_lambda(&p, 1.0, d).unwrap();
        prop_assert!((distortion_integral(&p, 1.0, lambda).value - d).abs() <= 1e-10 * d);
        prop_assert!(lambda <= wvs_peak(&p, 1.0));
    }
}

proptest! {
    // the oracle-equivalence contract asks for 100 drawn instances
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn sweep_matches_level_bisection_oracle(
        ab in dof_strategy(),
        s in 0.01..200.0f64,
        theta2 in 0.005..5.0f64,
    ) {
        let p = FilterParams::from_dof(ab, 1.0).unwrap();
        let sol = capacity_waterfill(&p, s, theta2, 1e-12).unwrap();

        // independent route: bisect the water level on the budget equation
        let spent = |level: f64| {
            let mut total = 0.0;
            let mut k = 0;
            loop {
                let nu2 = theta2 / p.eigenvalue(k);
                if nu2 >= level {
                    break total;
                }
                total += level - nu2;
                k += 1;
            }
        };
        let lo = theta2 / p.eigenvalue(0);
        let mut hi = lo + s + 1.0;
        while spent(hi) < s {
            hi *= 2.0;
        }
        let level = bisect_increasing(spent, lo, hi, s, 1e-14).unwrap();
        let mut c_oracle = 0.0;
        let mut k = 0;
        loop {
            let nu2 = theta2 / p.eigenvalue(k);
            if nu2 >= level {
                break;
            }
            c_oracle += 0.5 * (level / nu2).ln();
            k += 1;
        }
        prop_assert!((sol.level - level).abs() <= 1e-8 * level);
        prop_assert!((sol.value - c_oracle).abs() <= 1e-8 * c_oracle.max(1e-12));
    }
}
