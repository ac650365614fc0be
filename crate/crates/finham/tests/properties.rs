//! Randomized invariants over parameter space, kept to the claims the
//! library actually makes.

use proptest::prelude::*;

use finham::gauge::{apply_local_transformation, GaugeSpec};
use finham::grid::{Field, Grid, Grid1D};
use finham::higgs::mass_coefficient;
use finham::martingale::{
    check_bs_martingale, check_negative_rate_identity, equilibrium_residual,
    solve_equilibrium_volatility, DerivativeMode,
};
use finham::params::{vol_coeff_map, BsParams};
use finham::pricing::Payoff;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn exponential_annihilation_holds_across_parameters(
        sigma in 0.01f64..1.0,
        r in -1.0f64..1.0,
    ) {
        let p = BsParams::new(sigma, r).unwrap();
        let g = Grid1D::new(-2.0_f64, 2.0, 65).unwrap();
        let res = check_bs_martingale(p, &g, DerivativeMode::Analytic)
            .unwrap()
            .max_interior_residual;
        prop_assert!(res <= 1e-12, "residual {res:e} at sigma={sigma}, r={r}");
    }

    #[test]
    fn identified_correlation_is_unit_in_magnitude(
        alpha in -2.0f64..4.0,
        y in -3.0f64..3.0,
        lambda in 0.1f64..10.0,
        mu in -10.0f64..10.0,
    ) {
        let v = vol_coeff_map(alpha, y, lambda, mu).unwrap();
        // rho zeta squared must reproduce zeta^2, i.e. |rho| = 1
        let gap = (v.rho_zeta * v.rho_zeta - v.zeta_sq).abs();
        prop_assert!(gap <= 1e-12 * v.zeta_sq, "gap {gap:e}");
        let rate_gap = (v.rate - (lambda * (-y).exp() + mu)).abs();
        prop_assert!(rate_gap == 0.0);
    }

    #[test]
    fn equilibrium_roots_from_constructed_quadratics(
        u1 in 0.05f64..8.0,
        u2 in 0.05f64..8.0,
    ) {
        let lambda = u1 * u2;
        let mu = -(u1 + u2);
        let roots = solve_equilibrium_volatility(lambda, mu).unwrap();
        prop_assert!(!roots.roots_y.is_empty());
        for &y in &roots.roots_y {
            let res = equilibrium_residual(lambda, mu, y).abs();
            prop_assert!(res <= 1e-10, "quadratic residual {res:e}");
        }
        for r in check_negative_rate_identity(lambda, mu, &roots) {
            prop_assert!(r <= 1e-10, "rate identity residual {r:e}");
        }
    }

    #[test]
    fn mass_closed_form_holds_for_either_rate_sign(
        e_y in 0.02f64..2.0,
        r_mag in 0.02f64..1.0,
        negative in any::<bool>(),
    ) {
        let r = if negative { -r_mag } else { r_mag };
        let m = mass_coefficient(e_y, r).unwrap().coefficient;
        let closed = -(2.0 * r - e_y).powi(2) / (4.0 * r);
        prop_assert!((m - closed).abs() <= 1e-12, "{m} vs {closed}");
    }

    #[test]
    fn scaling_transformation_roundtrips(
        omega in -0.5f64..0.5,
        amp in 0.1f64..2.0,
    ) {
        let g = Grid1D::new(-1.0_f64, 1.0, 33).unwrap();
        let gs = GaugeSpec::new(omega, Field::sample_1d(&g, |x| amp * (1.3 * x).sin())).unwrap();
        let f = Field::sample_1d(&g, |x| 1.0 + 0.5 * x.cos());
        let forward = apply_local_transformation(&gs, &f, false).unwrap();
        let back = apply_local_transformation(&gs, &forward, true).unwrap();
        let worst = back
            .sub(&f)
            .unwrap()
            .sup_norm();
        prop_assert!(worst <= 1e-12 * f.sup_norm(), "roundtrip defect {worst:e}");
    }

    #[test]
    fn payoff_parity_is_pointwise(
        strike in 1.0f64..500.0,
        x in -1.0f64..7.0,
    ) {
        let c = Payoff::call(strike).unwrap().value(x);
        let p = Payoff::put(strike).unwrap().value(x);
        let gap = (c - p - (x.exp() - strike)).abs();
        let scale = strike.max(x.exp());
        prop_assert!(gap <= 1e-12 * scale, "parity gap {gap:e}");
    }
}

#[test]
fn single_precision_path_stays_usable() {
    let p = BsParams::new(0.2f32, 0.05f32).unwrap();
    let g = Grid1D::new(-1.0f32, 1.0, 33).unwrap();
    let res = check_bs_martingale(p, &g, DerivativeMode::Analytic)
        .unwrap()
        .max_interior_residual;
    assert!(res <= 1e-5, "f32 analytic residual {res:e}");

    let roots = solve_equilibrium_volatility(2.0f32, -3.0).unwrap();
    assert_eq!(roots.roots_y.len(), 2);
    assert!(roots.roots_y[0].abs() <= 1e-6);
    assert!((roots.roots_y[1] - std::f32::consts::LN_2).abs() <= 1e-6);

    let m = mass_coefficient(0.04f32, 0.05).unwrap().coefficient;
    assert!((m - (-0.018)).abs() <= 1e-6, "f32 mass {m}");

    let gs = GaugeSpec::new(0.1f32, Field::sample_1d(&g, |x| x)).unwrap();
    let f = Field::constant(Grid::One(g), 1.0f32);
    let forward = apply_local_transformation(&gs, &f, false).unwrap();
    let back = apply_local_transformation(&gs, &forward, true).unwrap();
    assert!(back.sub(&f).unwrap().sup_norm() <= 1e-6);
}
