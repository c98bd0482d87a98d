//! Parameter flags and the `key = value` config file.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::Args;
use o2hopf_core::{ModelParams, RawParams};
use serde::Deserialize;

use crate::failure::Failure;

#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    /// Feed concentration (default 2)
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Bifurcation parameter; defaults to beta_1 + mu
    #[arg(long, allow_negative_numbers = true, conflicts_with = "mu")]
    pub beta: Option<f64>,
    /// Distance from onset, beta = beta_1 + mu (default 0)
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Diffusivity of u1 (default 1)
    #[arg(long = "d1", visible_alias = "delta1", allow_negative_numbers = true)]
    pub delta1: Option<f64>,
    /// Diffusivity of u2 (default 1)
    #[arg(long = "d2", visible_alias = "delta2", allow_negative_numbers = true)]
    pub delta2: Option<f64>,
    /// Half-length L of the periodic domain [-L, L) (default pi)
    #[arg(long, allow_negative_numbers = true)]
    pub half_length: Option<f64>,
    /// File of `key = value` lines (alpha, beta, delta1, delta2, half_length); flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    alpha: Option<f64>,
    beta: Option<f64>,
    delta1: Option<f64>,
    delta2: Option<f64>,
    half_length: Option<f64>,
}

fn read_config(path: &Path) -> Result<ConfigFile, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::validation(format!("bad config {}: {e}", path.display())))
}

/// Which of `beta` / `mu` fixes the bifurcation parameter.
#[derive(Debug, Clone, Copy)]
pub enum BetaSpec {
    Beta(f64),
    Mu(f64),
}

impl ParamArgs {
    /// Merge defaults, config file and flags. Only positivity is checked here.
    pub fn resolve(&self) -> Result<(RawParams, BetaSpec), Failure> {
        let file = match &self.config {
            Some(p) => read_config(p)?,
            None => ConfigFile::default(),
        };
        let raw = RawParams {
            alpha: self.alpha.or(file.alpha).unwrap_or(2.0),
            beta: 1.0,
            delta1: self.delta1.or(file.delta1).unwrap_or(1.0),
            delta2: self.delta2.or(file.delta2).unwrap_or(1.0),
            half_length: self.half_length.or(file.half_length).unwrap_or(PI),
        };
        let spec = match (self.beta, self.mu, file.beta) {
            (Some(b), _, _) => BetaSpec::Beta(b),
            (None, Some(m), _) => BetaSpec::Mu(m),
            (None, None, Some(b)) => BetaSpec::Beta(b),
            (None, None, None) => BetaSpec::Mu(0.0),
        };
        Ok((raw, spec))
    }

    pub fn params(&self) -> Result<ModelParams, Failure> {
        let (raw, spec) = self.resolve()?;
        Ok(apply_beta(raw, spec)?)
    }
}

/// Fix `beta` on a raw record and check positivity.
pub fn apply_beta(raw: RawParams, spec: BetaSpec) -> o2hopf_core::Result<ModelParams> {
    let base = RawParams { beta: 1.0, ..raw }.check_positive()?;
    match spec {
        BetaSpec::Beta(b) => base.with_beta(b),
        BetaSpec::Mu(m) => base.with_mu(m),
    }
}
