use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use finham::diff::{apply_derivative, DerivOrder};
use finham::error::{Error, Result};
use finham::gauge::{
    anomaly_terms, apply_local_transformation, commutator_norm, conjugation_shift_terms,
    gauge_condition_residuals, GaugeSpec,
};
use finham::grid::{Axis, Field, Grid, Grid1D, Grid2D};
use finham::hamiltonian::{GaugeHamiltonian, SigmaSq};
use finham::report::{read_columnar_values, write_field_columnar, Summary};

use crate::common::{push_check, RunSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ThetaChoice {
    Constant,
    LinearX,
    LinearXy,
    /// profile values read from --theta-file, column order x y value
    File,
}

#[derive(Args)]
pub struct GaugeArgs {
    #[arg(long, value_enum, default_value_t = ThetaChoice::LinearX)]
    theta: ThetaChoice,
    /// Columnar file holding theta on the run grid; required with --theta file
    #[arg(long, value_name = "PATH")]
    theta_file: Option<PathBuf>,
    /// Scaling strength
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    omega: f64,
    /// Evaluate at sigma^2 = 2r, where the third commutation condition
    /// collapses onto the mixed derivative of theta
    #[arg(long)]
    hermiticity_locus: bool,

    #[arg(long, default_value_t = -1.0)]
    x_min: f64,
    #[arg(long, default_value_t = 1.0)]
    x_max: f64,
    #[arg(long, default_value_t = 65)]
    nx: usize,
    #[arg(long, default_value_t = -1.0)]
    y_min: f64,
    #[arg(long, default_value_t = 1.0)]
    y_max: f64,
    #[arg(long, default_value_t = 65)]
    ny: usize,
}

fn theta_field(args: &GaugeArgs, g2: Grid2D<f64>) -> Result<(GaugeSpec<f64>, &'static str)> {
    let grid = Grid::Two(g2);
    match args.theta {
        ThetaChoice::Constant => Ok((GaugeSpec::constant(grid, args.omega, 1.0)?, "constant")),
        ThetaChoice::LinearX => Ok((GaugeSpec::linear_x(grid, args.omega)?, "linear-x")),
        ThetaChoice::LinearXy => Ok((GaugeSpec::linear_xy(grid, args.omega)?, "linear-xy")),
        ThetaChoice::File => {
            let path = args.theta_file.as_ref().ok_or_else(|| Error::InvalidParameter {
                name: "theta-file",
                reason: "required when --theta file is chosen".to_string(),
            })?;
            let values = read_columnar_values(path)?;
            let theta = Field::from_values(grid, values)?;
            Ok((GaugeSpec::new(args.omega, theta)?, "file"))
        }
    }
}

pub fn run(args: &GaugeArgs, settings: &RunSettings) -> Result<u8> {
    let g2 = Grid2D::new(
        Grid1D::new(args.x_min, args.x_max, args.nx)?,
        Grid1D::new(args.y_min, args.y_max, args.ny)?,
    );
    let bs = settings.config.bs()?;
    let sigma_sq_eff =
        if args.hermiticity_locus { 2.0 * settings.config.r } else { bs.sigma_sq() };
    let h = GaugeHamiltonian::new(
        SigmaSq::Constant(sigma_sq_eff),
        settings.config.r,
        settings.config.coupling()?,
    )?;
    let (gs, family) = theta_field(args, g2)?;

    let mut summary = Summary::new();
    summary.push("command", "gauge");
    summary.push("profile", &settings.profile_name);
    summary.push("theta_family", family);
    summary.push("omega", args.omega);
    summary.push("sigma_sq_effective", sigma_sq_eff);
    summary.push("hermiticity_locus", args.hermiticity_locus);
    let mut ok = true;

    let probes = [
        Field::sample_2d(&g2, |x, y| (x + y).exp()),
        Field::sample_2d(&g2, |x, _| (0.5 * x).exp()),
        Field::sample_2d(&g2, |x, y| 1.0 + 0.2 * x.sin() * y.cos()),
    ];
    summary.push("commutator_at_omega", format!("{:e}", commutator_norm(&h, &gs, &probes)?));
    let gs0 = GaugeSpec::new(0.0, gs.theta.clone())?;
    push_check(
        &mut summary,
        "commutator_at_zero",
        commutator_norm(&h, &gs0, &probes)?,
        settings.tol.algebraic,
        &mut ok,
    );

    // U^-1 U f must give f back up to rounding; this is the gate that makes
    // the exit code meaningful for every theta family.
    let lifted = apply_local_transformation(&gs, &probes[0], false)?;
    let back = apply_local_transformation(&gs, &lifted, true)?;
    let roundtrip = back.sub(&probes[0])?.sup_norm() / probes[0].sup_norm();
    push_check(&mut summary, "transform_roundtrip", roundtrip, settings.tol.algebraic, &mut ok);

    // Two bookkeepings of the induced extra terms, compared on the x axis
    // along the middle row of the profile.
    let gx = g2.x;
    let j_mid = g2.ny() / 2;
    let row: Vec<f64> = (0..g2.nx()).map(|i| gs.theta.at2(i, j_mid)).collect();
    let theta_x = Field::from_values(Grid::One(gx), row)?;
    let gs1 = GaugeSpec::new(args.omega, theta_x)?;
    let f1 = Field::sample_1d(&gx, |x| x.exp());
    let anomaly = anomaly_terms(&gs1, bs, &f1)?;
    let shift = conjugation_shift_terms(&gs1, bs, &f1)?;
    let mut table = String::new();
    let _ = writeln!(table, "# columns = x anomaly shift gap");
    let mut sup_gap: f64 = 0.0;
    for (i, x) in gx.nodes().enumerate() {
        let a = anomaly.values()[i];
        let s = shift.values()[i];
        sup_gap = sup_gap.max((a - s).abs());
        let _ = writeln!(table, "{x} {a} {s} {}", a - s);
    }
    std::fs::write(settings.out.join("gauge_shift_comparison.txt"), table)?;
    summary.push("shift_convention_gap", format!("{sup_gap:e}"));

    let res = gauge_condition_residuals(&gs, sigma_sq_eff, settings.config.r, &probes[0])?;
    let header = [("theta_family", family.to_string()), ("omega", args.omega.to_string())];
    for (name, field) in [
        ("slope_balance", &res.slope_balance),
        ("probe_alignment", &res.probe_alignment),
        ("hermiticity_balance", &res.hermiticity_balance),
    ] {
        write_field_columnar(&settings.out.join(format!("{name}.txt")), field, &header)?;
        summary.push(&format!("{name}_sup"), format!("{:e}", field.sup_norm()));
    }

    if args.hermiticity_locus {
        // On the locus the third condition must be exactly -4 theta_xy.
        let dx = apply_derivative(&gs.theta, Axis::X, DerivOrder::First)?;
        let dxy = apply_derivative(&dx, Axis::Y, DerivOrder::First)?;
        let defect = res
            .hermiticity_balance
            .zip_with(&dxy, |h3, t| h3 + 4.0 * t)?
            .sup_norm();
        push_check(&mut summary, "locus_defect", defect, settings.tol.algebraic, &mut ok);
    }

    summary.push("overall", crate::common::status(ok));
    settings.emit("gauge_summary.txt", &summary)?;
    Ok(if ok { 0 } else { 1 })
}
