use std::path::{Path, PathBuf};

use clap::ValueEnum;
use finham::config::ModelConfig;
use finham::error::{Error, Result};
use finham::report::{ReportFormat, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatChoice {
    Table,
    Structured,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileChoice {
    Default,
    Strict,
    Loose,
}

/// Check thresholds by kind: exact algebra, finite differences, sampling.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub algebraic: f64,
    pub discretization: f64,
    pub sigma_band: f64,
}

impl Tolerances {
    pub fn profile(p: ProfileChoice) -> Self {
        match p {
            ProfileChoice::Default => {
                Tolerances { algebraic: 1e-10, discretization: 1e-3, sigma_band: 3.0 }
            }
            ProfileChoice::Strict => {
                Tolerances { algebraic: 1e-12, discretization: 1e-4, sigma_band: 2.0 }
            }
            ProfileChoice::Loose => {
                Tolerances { algebraic: 1e-8, discretization: 1e-2, sigma_band: 4.0 }
            }
        }
    }
}

pub struct RunSettings {
    pub config: ModelConfig<f64>,
    pub seed: u64,
    pub out: PathBuf,
    pub format: ReportFormat,
    pub tol: Tolerances,
    pub profile_name: String,
}

impl RunSettings {
    pub fn build(
        config_path: Option<&Path>,
        seed: u64,
        out: &Path,
        format: FormatChoice,
        profile: ProfileChoice,
    ) -> Result<Self> {
        let config = match config_path {
            Some(p) => ModelConfig::from_file(p).map_err(|e| match e {
                Error::Io(io) => Error::Config {
                    path: p.display().to_string(),
                    line: 0,
                    reason: io.to_string(),
                },
                other => other,
            })?,
            None => ModelConfig::default(),
        };
        std::fs::create_dir_all(out)?;
        let format = match format {
            FormatChoice::Table => ReportFormat::Table,
            FormatChoice::Structured => ReportFormat::Structured,
        };
        let profile_name = match profile {
            ProfileChoice::Default => "default",
            ProfileChoice::Strict => "strict",
            ProfileChoice::Loose => "loose",
        };
        Ok(RunSettings {
            config,
            seed,
            out: out.to_path_buf(),
            format,
            tol: Tolerances::profile(profile),
            profile_name: profile_name.to_string(),
        })
    }

    /// Writes the summary into the output directory and echoes it to stdout.
    pub fn emit(&self, name: &str, summary: &Summary) -> Result<()> {
        summary.write_to(&self.out.join(name), self.format)?;
        print!("{}", summary.render(self.format));
        Ok(())
    }
}

/// Exit code for an error that escaped a subcommand: instability and solver
/// breakdown are mathematical failures, everything else is bad input.
pub fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Unstable { .. } | Error::Solve(_) => 1,
        _ => 2,
    }
}

pub fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

pub fn push_check(summary: &mut Summary, key: &str, value: f64, tol: f64, ok: &mut bool) -> bool {
    let pass = value.abs() <= tol;
    summary.push(key, format!("{value:e}"));
    summary.push(&format!("{key}_tolerance"), format!("{tol:e}"));
    summary.push(&format!("{key}_status"), status(pass));
    *ok &= pass;
    pass
}

/// Uniform grid of `steps` points from lo to hi inclusive.
pub fn linspace(lo: f64, hi: f64, steps: usize, name: &'static str) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(Error::InvalidParameter { name, reason: "empty range: need at least 1 step".to_string() });
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::InvalidParameter {
            name,
            reason: format!("bad range [{lo}, {hi}]"),
        });
    }
    if steps == 1 {
        return Ok(vec![lo]);
    }
    let h = (hi - lo) / (steps - 1) as f64;
    Ok((0..steps).map(|i| lo + h * i as f64).collect())
}
