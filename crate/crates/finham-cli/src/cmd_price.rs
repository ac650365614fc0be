use std::fmt::Write as _;

use clap::{Args, ValueEnum};
use finham::error::Result;
use finham::grid::{Field, Grid1D, Grid2D};
use finham::params::{BsParams, MgParams};
use finham::pricing::{
    closed_form_bs, evolve_mg, price_european_bs, BoundaryMode, EvolutionConfig, Payoff, Scheme,
};
use finham::report::{write_field_columnar, Summary};

use crate::common::{push_check, status, RunSettings};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PayoffChoice {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeChoice {
    /// Crank-Nicolson
    Cn,
    /// implicit Euler
    Ie,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundaryChoice {
    /// payoff-asymptotic edge values
    Dirichlet,
    /// one-sided difference rows at the edges
    OneSided,
}

#[derive(Args)]
pub struct PriceArgs {
    #[arg(long, value_enum, default_value_t = PayoffChoice::Call)]
    payoff: PayoffChoice,
    #[arg(long, default_value_t = 100.0)]
    strike: f64,
    /// Time to expiry in years; 0 echoes the payoff
    #[arg(long, default_value_t = 1.0)]
    tau: f64,
    #[arg(long, default_value_t = 256)]
    steps: usize,
    #[arg(long, default_value_t = 512)]
    nx: usize,
    /// Log-price halfwidth around ln(strike)
    #[arg(long, default_value_t = 3.0)]
    x_span: f64,
    #[arg(long, value_enum, default_value_t = SchemeChoice::Cn)]
    scheme: SchemeChoice,
    #[arg(long, value_enum, default_value_t = BoundaryChoice::Dirichlet)]
    boundary: BoundaryChoice,
    /// Skip the implicit-Euler startup steps
    #[arg(long)]
    no_rannacher: bool,

    /// Also run the two-dimensional generator with the volatility direction
    /// switched off and compare its middle row against the one-dimensional price
    #[arg(long)]
    check_mg_degenerate: bool,
    /// Volatility-axis nodes for the degenerate check
    #[arg(long, default_value_t = 9)]
    ny: usize,
    /// Time steps for the degenerate check
    #[arg(long, default_value_t = 64)]
    mg_steps: usize,
}

pub fn run(args: &PriceArgs, settings: &RunSettings) -> Result<u8> {
    let bs = settings.config.bs()?;
    let payoff = match args.payoff {
        PayoffChoice::Call => Payoff::call(args.strike)?,
        PayoffChoice::Put => Payoff::put(args.strike)?,
    };
    let ln_k = args.strike.ln();
    let grid = Grid1D::new(ln_k - args.x_span, ln_k + args.x_span, args.nx)?;
    let mut cfg = EvolutionConfig::new(args.tau, args.steps)?
        .with_scheme(match args.scheme {
            SchemeChoice::Cn => Scheme::CrankNicolson,
            SchemeChoice::Ie => Scheme::ImplicitEuler,
        })
        .with_boundary(match args.boundary {
            BoundaryChoice::Dirichlet => BoundaryMode::DirichletAsymptotic,
            BoundaryChoice::OneSided => BoundaryMode::OneSided,
        });
    if args.no_rannacher {
        cfg = cfg.without_rannacher();
    }

    let mut summary = Summary::new();
    summary.push("command", "price");
    summary.push("profile", &settings.profile_name);
    summary.push("payoff", format!("{:?}", args.payoff).to_lowercase());
    summary.push("strike", args.strike);
    summary.push("tau", args.tau);
    summary.push("sigma", settings.config.sigma);
    summary.push("r", settings.config.r);
    summary.push("nx", args.nx);
    summary.push("steps", args.steps);
    let mut ok = true;

    let v = price_european_bs(bs, &payoff, &grid, &cfg)?;
    write_field_columnar(
        &settings.out.join("price_surface.txt"),
        &v,
        &[("strike", args.strike.to_string()), ("tau", args.tau.to_string())],
    )?;

    if args.tau == 0.0 {
        // Zero horizon returns the terminal condition untouched; there is no
        // closed form to compare against at expiry.
        let echoed = v.values() == payoff.terminal(&grid).values();
        summary.push("payoff_echo_status", status(echoed));
        summary.push("comparison", "skipped (tau = 0)");
        ok &= echoed;
    } else {
        let mut table = String::new();
        let _ = writeln!(table, "# columns = s price reference rel_error");
        let mut max_rel: f64 = 0.0;
        for (i, x) in grid.nodes().enumerate() {
            if (x - ln_k).abs() > 0.5 {
                continue;
            }
            let s = x.exp();
            let p = v.values()[i];
            let reference = closed_form_bs(&payoff, s, bs.r, bs.sigma, args.tau)?;
            let rel = (p - reference).abs() / reference;
            max_rel = max_rel.max(rel);
            let _ = writeln!(table, "{s} {p} {reference} {rel:e}");
        }
        std::fs::write(settings.out.join("price_comparison.txt"), table)?;
        summary.push("band_max_rel_error", format!("{max_rel:e}"));

        let i_atm = grid.nearest_index(ln_k);
        let s_atm = grid.node(i_atm).exp();
        let reference = closed_form_bs(&payoff, s_atm, bs.r, bs.sigma, args.tau)?;
        summary.push("atm_price", v.values()[i_atm]);
        summary.push("atm_reference", reference);
        push_check(
            &mut summary,
            "atm_rel_error",
            (v.values()[i_atm] - reference) / reference,
            settings.tol.discretization,
            &mut ok,
        );
    }

    if args.check_mg_degenerate {
        let gap = degenerate_gap(args, &payoff, bs)?;
        push_check(
            &mut summary,
            "mg_degenerate_row_gap",
            gap / args.strike,
            settings.tol.discretization,
            &mut ok,
        );
    }

    summary.push("overall", status(ok));
    settings.emit("price_summary.txt", &summary)?;
    Ok(if ok { 0 } else { 1 })
}

/// Sup gap between the middle row of the volatility-degenerate 2-d evolution
/// and the matching 1-d price, away from the lateral edges.
fn degenerate_gap(args: &PriceArgs, payoff: &Payoff<f64>, bs: BsParams<f64>) -> Result<f64> {
    let tau = if args.tau > 0.0 { args.tau } else { 0.5 };
    let ln_k = args.strike.ln();
    let y0 = bs.sigma_sq().ln();
    let gx = Grid1D::new(ln_k - args.x_span, ln_k + args.x_span, args.nx)?;
    let gy = Grid1D::new(y0 - 0.2, y0 + 0.2, args.ny)?;
    let g2 = Grid2D::new(gx, gy);
    let terminal = Field::sample_2d(&g2, |x, _| payoff.value(x));
    let cfg = EvolutionConfig::new(tau, args.mg_steps)?.with_boundary(BoundaryMode::OneSided);
    let mg = MgParams::new(bs.r, 1e-8, 0.0, 1.5, 0.0, 0.0)?;
    let v2 = evolve_mg(&mg, &terminal, &cfg)?;

    let j0 = gy.nearest_index(y0);
    let sigma_row = gy.node(j0).exp().sqrt();
    let v1 = price_european_bs(BsParams::new(sigma_row, bs.r)?, payoff, &gx, &cfg)?;
    let mut worst = 0.0_f64;
    for i in 5..gx.n() - 5 {
        worst = worst.max((v2.at2(i, j0) - v1.at1(i)).abs());
    }
    Ok(worst)
}
