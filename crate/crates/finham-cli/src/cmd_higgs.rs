use std::fmt::Write as _;

use clap::Args;
use finham::error::Result;
use finham::higgs::{mass_coefficient, vacuum_price_only};
use finham::report::Summary;

use crate::common::{linspace, push_check, status, RunSettings};

#[derive(Args)]
pub struct HiggsArgs {
    #[arg(long, default_value_t = 0.01)]
    r_min: f64,
    #[arg(long, default_value_t = 0.2)]
    r_max: f64,
    #[arg(long, default_value_t = 11)]
    r_steps: usize,
    /// Volatility level e^y swept on the second axis
    #[arg(long, default_value_t = 0.01)]
    ey_min: f64,
    #[arg(long, default_value_t = 0.4)]
    ey_max: f64,
    #[arg(long, default_value_t = 11)]
    ey_steps: usize,
}

pub fn run(args: &HiggsArgs, settings: &RunSettings) -> Result<u8> {
    let rates = linspace(args.r_min, args.r_max, args.r_steps, "r_steps")?;
    let levels = linspace(args.ey_min, args.ey_max, args.ey_steps, "ey_steps")?;

    let mut table = String::new();
    let _ = writeln!(table, "# columns = r e_y phi_vac mass status");
    let mut singular = 0usize;
    let mut massless = 0usize;
    for &r in &rates {
        for &e_y in &levels {
            match (vacuum_price_only(e_y, r), mass_coefficient(e_y, r)) {
                (Ok(vac), Ok(mass)) => {
                    let tag = if mass.vanishes_at_hermiticity {
                        massless += 1;
                        "massless"
                    } else {
                        "ok"
                    };
                    let _ =
                        writeln!(table, "{r} {e_y} {} {} {tag}", vac.phi_vac, mass.coefficient);
                }
                // r = 0 (or a non-finite combination) has no vacuum level;
                // the row is kept and marked rather than aborting the sweep.
                _ => {
                    singular += 1;
                    let _ = writeln!(table, "{r} {e_y} NaN NaN singular");
                }
            }
        }
    }
    std::fs::write(settings.out.join("higgs_sweep.txt"), table)?;

    let mut summary = Summary::new();
    summary.push("command", "higgs");
    summary.push("profile", &settings.profile_name);
    summary.push("rows", rates.len() * levels.len());
    summary.push("singular_rows", singular);
    summary.push("massless_rows", massless);
    let mut ok = true;

    let vac = vacuum_price_only(0.04, 0.05)?;
    let mass = mass_coefficient(0.04, 0.05)?;
    summary.push("reference_r", 0.05);
    summary.push("reference_e_y", 0.04);
    summary.push("reference_phi_vac", vac.phi_vac);
    summary.push("reference_mass", mass.coefficient);
    push_check(
        &mut summary,
        "reference_phi_vac_error",
        vac.phi_vac - 0.6,
        settings.tol.algebraic,
        &mut ok,
    );
    push_check(
        &mut summary,
        "reference_mass_error",
        mass.coefficient - (-0.018),
        settings.tol.algebraic,
        &mut ok,
    );

    summary.push("overall", status(ok));
    settings.emit("higgs_summary.txt", &summary)?;
    Ok(if ok { 0 } else { 1 })
}
