//! Command line front end for the finham library: each subcommand runs a
//! family of checks, writes its report files into --out, and exits 0 when
//! every gated check passes, 1 when a mathematical check fails, 2 on bad
//! usage or input.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod cmd_constraints;
mod cmd_gauge;
mod cmd_higgs;
mod cmd_martingale;
mod cmd_price;
mod common;

use common::{FormatChoice, ProfileChoice, RunSettings};

#[derive(Parser)]
#[command(name = "finham", version, about = "Checks and pricing for option generators in log coordinates")]
struct Cli {
    /// Parameter file with key=value lines (sigma, r, zeta, rho, alpha, lambda, mu, gamma)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Seed shared by every randomized piece of a run
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Directory that receives the report files
    #[arg(long, global = true, value_name = "DIR", default_value = "finham-out")]
    out: PathBuf,

    /// Report rendering
    #[arg(long, global = true, value_enum, default_value_t = FormatChoice::Table)]
    format: FormatChoice,

    /// Check-threshold preset
    #[arg(long, global = true, value_enum, default_value_t = ProfileChoice::Default, value_name = "NAME")]
    tolerance_profile: ProfileChoice,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Drift-free state residuals for both generators plus a sampled expectation check
    Martingale(cmd_martingale::MartingaleArgs),
    /// Local scaling transformations: commutators, shift-term bookkeeping, commutation conditions
    Gauge(cmd_gauge::GaugeArgs),
    /// Vacuum level and volatility mass over a grid of rates and volatility levels
    Higgs(cmd_higgs::HiggsArgs),
    /// Backward evolution of a payoff with a closed-form reference column
    Price(cmd_price::PriceArgs),
    /// Parameter identification, equilibrium volatility roots, and noise-pair checks
    Constraints(cmd_constraints::ConstraintsArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let settings = match RunSettings::build(
        cli.config.as_deref(),
        cli.seed,
        &cli.out,
        cli.format,
        cli.tolerance_profile,
    ) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("finham: {e}");
            return ExitCode::from(common::exit_for(&e));
        }
    };
    let run = match &cli.command {
        Command::Martingale(args) => cmd_martingale::run(args, &settings),
        Command::Gauge(args) => cmd_gauge::run(args, &settings),
        Command::Higgs(args) => cmd_higgs::run(args, &settings),
        Command::Price(args) => cmd_price::run(args, &settings),
        Command::Constraints(args) => cmd_constraints::run(args, &settings),
    };
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("finham: {e}");
            ExitCode::from(common::exit_for(&e))
        }
    }
}
