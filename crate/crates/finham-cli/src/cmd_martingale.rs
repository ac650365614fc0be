use clap::{Args, ValueEnum};
use finham::error::Result;
use finham::grid::{Grid1D, Grid2D};
use finham::hamiltonian::{MgCoefficientMode, MgHamiltonian};
use finham::martingale::{
    bs_exponential_state_residual, check_mg_martingale, discounted_expectation_check,
    DerivativeMode,
};
use finham::report::{write_field_columnar, Summary};

use crate::common::{push_check, status, RunSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateChoice {
    /// e^x, which both generators annihilate
    ExpX,
    /// e^{2x}, a deliberate counterexample
    #[value(name = "exp-2x")]
    Exp2x,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    /// exact derivatives of the exponential state
    Analytic,
    /// central differences of the sampled state
    Central,
}

#[derive(Args)]
pub struct MartingaleArgs {
    #[arg(long, default_value_t = -2.0)]
    x_min: f64,
    #[arg(long, default_value_t = 2.0)]
    x_max: f64,
    #[arg(long, default_value_t = 257)]
    nx: usize,
    #[arg(long, default_value_t = -2.0)]
    y_min: f64,
    #[arg(long, default_value_t = 1.0)]
    y_max: f64,
    #[arg(long, default_value_t = 65)]
    ny: usize,

    /// Exponential state driven through the one-dimensional check
    #[arg(long, value_enum, default_value_t = StateChoice::ExpX)]
    state: StateChoice,
    #[arg(long, value_enum, default_value_t = ModeChoice::Analytic)]
    mode: ModeChoice,

    /// Spot for the sampled-expectation check
    #[arg(long, default_value_t = 100.0)]
    s0: f64,
    /// Horizon in years for the sampled-expectation check
    #[arg(long, default_value_t = 1.0)]
    horizon: f64,
    #[arg(long, default_value_t = 100_000)]
    paths: usize,
}

pub fn run(args: &MartingaleArgs, settings: &RunSettings) -> Result<u8> {
    let bs = settings.config.bs()?;
    let grid = Grid1D::new(args.x_min, args.x_max, args.nx)?;
    let grid2 = Grid2D::new(
        Grid1D::new(args.x_min, args.x_max, args.nx)?,
        Grid1D::new(args.y_min, args.y_max, args.ny)?,
    );

    let (mode, mode_name, tol) = match args.mode {
        ModeChoice::Analytic => (DerivativeMode::Analytic, "analytic", settings.tol.algebraic),
        ModeChoice::Central => (DerivativeMode::Central, "central", settings.tol.discretization),
    };
    let (a, state_name) = match args.state {
        StateChoice::ExpX => (1.0, "exp-x"),
        StateChoice::Exp2x => (2.0, "exp-2x"),
    };

    let mut summary = Summary::new();
    summary.push("command", "martingale");
    summary.push("profile", &settings.profile_name);
    summary.push("seed", settings.seed);
    summary.push("sigma", settings.config.sigma);
    summary.push("r", settings.config.r);
    summary.push("state", state_name);
    summary.push("mode", mode_name);
    let mut ok = true;

    let bs_rep = bs_exponential_state_residual(bs, &grid, mode, a)?;
    push_check(&mut summary, "bs_state_residual", bs_rep.max_interior_residual, tol, &mut ok);
    write_field_columnar(
        &settings.out.join("bs_residual.txt"),
        &bs_rep.residual_field,
        &[("state", state_name.to_string()), ("mode", mode_name.to_string())],
    )?;

    let mg = MgHamiltonian::new(MgCoefficientMode::Fixed(settings.config.mg()?));
    let mg_rep = check_mg_martingale(&mg, &grid2, mode)?;
    push_check(&mut summary, "mg_state_residual", mg_rep.max_interior_residual, tol, &mut ok);
    for (name, v) in &mg_rep.constraint_residuals {
        summary.push(name, format!("{v:e}"));
    }
    write_field_columnar(
        &settings.out.join("mg_residual.txt"),
        &mg_rep.residual_field,
        &[("state", "exp-x".to_string()), ("mode", mode_name.to_string())],
    )?;

    let mc = discounted_expectation_check(bs, args.s0, args.horizon, args.paths, settings.seed)?;
    let gap = (mc.estimate - args.s0).abs();
    let band = settings.tol.sigma_band * mc.std_error;
    let mc_ok = gap <= band;
    summary.push("mc_estimate", mc.estimate);
    summary.push("mc_std_error", format!("{:e}", mc.std_error));
    summary.push("mc_gap", format!("{gap:e}"));
    summary.push("mc_band", format!("{band:e}"));
    summary.push("mc_status", status(mc_ok));
    ok &= mc_ok;

    summary.push("overall", status(ok));
    settings.emit("martingale_summary.txt", &summary)?;
    Ok(if ok { 0 } else { 1 })
}
