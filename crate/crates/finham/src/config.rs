//! Flat `key = value` parameter files.
//!
//! Recognised keys: sigma, r, zeta, rho, alpha, lambda, mu, gamma. Lines
//! starting with `#` and blank lines are skipped. Every key is optional and
//! falls back to its default; unknown or repeated keys are rejected with the
//! offending line number.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::{BsParams, GammaCoupling, MgParams};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelConfig<T> {
    pub sigma: T,
    pub r: T,
    pub zeta: T,
    pub rho: T,
    pub alpha: T,
    pub lambda: T,
    pub mu: T,
    pub gamma: T,
}

impl<T: Real> Default for ModelConfig<T> {
    fn default() -> Self {
        ModelConfig {
            sigma: T::of(0.2),
            r: T::of(0.05),
            zeta: T::of(1.0),
            rho: T::of(1.0),
            alpha: T::of(1.5),
            lambda: T::of(0.0),
            mu: T::of(0.05),
            gamma: T::of(1.0),
        }
    }
}

impl<T: Real> ModelConfig<T> {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text, &path.display().to_string())
    }

    pub fn from_str(text: &str, path: &str) -> Result<Self> {
        let mut seen: BTreeMap<String, f64> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config {
                    path: path.to_string(),
                    line: line_no,
                    reason: format!("expected `key = value`, got `{line}`"),
                });
            };
            let key = key.trim();
            let value = value.trim();
            if !KEYS.contains(&key) {
                return Err(Error::Config {
                    path: path.to_string(),
                    line: line_no,
                    reason: format!("unknown key `{key}`"),
                });
            }
            let parsed: f64 = value.parse().map_err(|_| Error::Config {
                path: path.to_string(),
                line: line_no,
                reason: format!("cannot parse `{value}` as a number"),
            })?;
            if seen.insert(key.to_string(), parsed).is_some() {
                return Err(Error::Config {
                    path: path.to_string(),
                    line: line_no,
                    reason: format!("duplicate key `{key}`"),
                });
            }
        }
        let mut cfg = ModelConfig::default();
        for (key, v) in seen {
            let v = T::of(v);
            match key.as_str() {
                "sigma" => cfg.sigma = v,
                "r" => cfg.r = v,
                "zeta" => cfg.zeta = v,
                "rho" => cfg.rho = v,
                "alpha" => cfg.alpha = v,
                "lambda" => cfg.lambda = v,
                "mu" => cfg.mu = v,
                "gamma" => cfg.gamma = v,
                _ => unreachable!("key filtered above"),
            }
        }
        Ok(cfg)
    }

    pub fn bs(&self) -> Result<BsParams<T>> {
        BsParams::new(self.sigma, self.r)
    }

    pub fn mg(&self) -> Result<MgParams<T>> {
        MgParams::new(self.r, self.zeta, self.rho, self.alpha, self.lambda, self.mu)
    }

    pub fn coupling(&self) -> Result<GammaCoupling<T>> {
        GammaCoupling::new(self.gamma)
    }
}

const KEYS: [&str; 8] = ["sigma", "r", "zeta", "rho", "alpha", "lambda", "mu", "gamma"];
