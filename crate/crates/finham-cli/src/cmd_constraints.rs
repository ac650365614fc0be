use clap::Args;
use finham::error::Result;
use finham::martingale::{
    check_negative_rate_identity, correlated_noise_pair, equilibrium_residual,
    solve_equilibrium_volatility, vacuum_constraint_residual,
};
use finham::params::{vol_coeff_map, MgParams, RhoSign};
use finham::report::Summary;

use crate::common::{push_check, status, RunSettings};

#[derive(Args)]
pub struct ConstraintsArgs {
    /// Volatility level at which the identification map is evaluated
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    y_ref: f64,
    /// Sample count for the noise-pair correlation check
    #[arg(long, default_value_t = 4096)]
    pair_samples: usize,
}

pub fn run(args: &ConstraintsArgs, settings: &RunSettings) -> Result<u8> {
    let (alpha, lambda, mu) = (settings.config.alpha, settings.config.lambda, settings.config.mu);

    let mut summary = Summary::new();
    summary.push("command", "constraints");
    summary.push("profile", &settings.profile_name);
    summary.push("alpha", alpha);
    summary.push("lambda", lambda);
    summary.push("mu", mu);
    summary.push("y_ref", args.y_ref);
    let mut ok = true;

    let map = vol_coeff_map(alpha, args.y_ref, lambda, mu)?;
    summary.push("zeta_sq", map.zeta_sq);
    summary.push("rho_zeta", map.rho_zeta);
    summary.push("rate", map.rate);
    summary.push(
        "identification_mode",
        if alpha == 1.5 { "constant (zeta = 1, |rho| = 1 at every level)" } else { "level-dependent" },
    );
    for (sign, name) in [(RhoSign::Plus, "plus"), (RhoSign::Minus, "minus")] {
        let p = MgParams::from_vol_coeff(alpha, args.y_ref, lambda, mu, sign)?;
        summary.push(&format!("zeta_{name}"), p.zeta);
        summary.push(&format!("rho_{name}"), p.rho);
        push_check(
            &mut summary,
            &format!("rho_unit_defect_{name}"),
            p.rho.abs() - 1.0,
            settings.tol.algebraic,
            &mut ok,
        );
    }

    let roots = solve_equilibrium_volatility(lambda, mu)?;
    summary.push("discriminant", roots.discriminant);
    if roots.roots_y.is_empty() {
        summary.push("equilibrium_roots", "no positive real roots");
    } else {
        let config_params = settings.config.mg()?;
        let rate_gaps = check_negative_rate_identity(lambda, mu, &roots);
        for (k, (&y, &gap)) in roots.roots_y.iter().zip(&rate_gaps).enumerate() {
            summary.push(&format!("root_{k}_y"), y);
            summary.push(&format!("root_{k}_level"), y.exp());
            push_check(
                &mut summary,
                &format!("root_{k}_residual"),
                equilibrium_residual(lambda, mu, y),
                settings.tol.algebraic,
                &mut ok,
            );
            push_check(
                &mut summary,
                &format!("root_{k}_rate_identity"),
                gap,
                settings.tol.algebraic,
                &mut ok,
            );
            // Stated-form residual with the coefficients taken verbatim from
            // the config; it coincides with the root residual only when those
            // coefficients come from the identification map.
            summary.push(
                &format!("root_{k}_stated_form"),
                format!("{:e}", vacuum_constraint_residual(&config_params, y)),
            );
        }
    }

    for (rho, name) in [(1.0, "plus"), (-1.0, "minus")] {
        let pair = correlated_noise_pair(rho, args.pair_samples, settings.seed)?;
        let exact = pair.sample_corr == rho;
        summary.push(&format!("noise_corr_{name}"), pair.sample_corr);
        summary.push(&format!("noise_corr_{name}_status"), status(exact));
        ok &= exact;
    }

    summary.push("overall", status(ok));
    settings.emit("constraints_summary.txt", &summary)?;
    Ok(if ok { 0 } else { 1 })
}
