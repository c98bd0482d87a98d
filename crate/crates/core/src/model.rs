//! Model parameters of the nondimensional Brusselator
//!
//! ```text
//! u1_t = delta1 u1_xx - (beta + 1) u1 + u1^2 u2 + alpha
//! u2_t = delta2 u2_xx + beta u1 - u1^2 u2
//! ```
//!
//! on the periodic interval `[-L, L)`, `L = half_length`. The dimensional
//! system with rates `k1..k4` and diffusivities `D1, D2` maps onto this form via
//! `alpha = sqrt(k3/k4) k1 B / k4`, `beta = k2 A / k4`, `delta_i = D_i / k4`
//! and time `k4 t`; only the nondimensional form is exposed.
//!
//! Wave numbers are `k = n * kappa` with `kappa = pi / L`. Diffusion only ever
//! enters through `delta_i k^2`, so every onset formula below is written in terms
//! of the effective diffusivities `kappa^2 delta_i`. For the default `L = pi`
//! these coincide with `delta_i`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unvalidated parameter record, as read from flags or a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta1: f64,
    pub delta2: f64,
    #[serde(default = "default_half_length")]
    pub half_length: f64,
}

fn default_half_length() -> f64 {
    PI
}

impl RawParams {
    pub fn new(alpha: f64, beta: f64, delta1: f64, delta2: f64) -> Self {
        Self {
            alpha,
            beta,
            delta1,
            delta2,
            half_length: PI,
        }
    }

    /// Checks positivity only. Inadmissible regimes are still representable so
    /// that sweeps can chart the admissibility boundary.
    pub fn check_positive(&self) -> Result<ModelParams> {
        let fields = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("half_length", self.half_length),
        ];
        for (field, value) in fields {
            // NaN fails this test as well.
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveParameter { field, value });
            }
        }
        Ok(ModelParams { raw: *self })
    }

    /// Full validation: positivity plus the admissibility assumption and `omega^2 > 0`.
    pub fn validate(&self) -> Result<ModelParams> {
        let params = self.check_positive()?;
        params.require_admissible()?;
        Ok(params)
    }
}

/// Validated parameter set (all fields strictly positive).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ModelParams {
    raw: RawParams,
}

/// Onset quantities derived from [`ModelParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnsetData {
    /// Critical value `beta_1 = 1 + alpha^2 + delta1 + delta2` (effective diffusivities).
    pub beta1: f64,
    /// Hopf frequency; zero when `omega_squared <= 0`.
    pub omega: f64,
    pub omega_squared: f64,
    /// `beta - beta_1`.
    pub mu: f64,
    /// `(1 + alpha sqrt(delta1/delta2))^2`, the uniform lower bound factor.
    pub assumption_bound: f64,
    pub admissible: bool,
}

impl ModelParams {
    pub fn alpha(&self) -> f64 {
        self.raw.alpha
    }
    pub fn beta(&self) -> f64 {
        self.raw.beta
    }
    pub fn delta1(&self) -> f64 {
        self.raw.delta1
    }
    pub fn delta2(&self) -> f64 {
        self.raw.delta2
    }
    pub fn half_length(&self) -> f64 {
        self.raw.half_length
    }
    pub fn raw(&self) -> RawParams {
        self.raw
    }

    /// Fundamental wave number `pi / L`.
    pub fn kappa(&self) -> f64 {
        PI / self.raw.half_length
    }

    /// Wave number of Fourier index `n`.
    pub fn wave_number(&self, n: i64) -> f64 {
        n as f64 * self.kappa()
    }

    /// Effective diffusivities `kappa^2 delta_i`.
    pub fn effective_diffusion(&self) -> (f64, f64) {
        let k2 = self.kappa() * self.kappa();
        (k2 * self.raw.delta1, k2 * self.raw.delta2)
    }

    /// Same parameters with a different `beta`.
    pub fn with_beta(&self, beta: f64) -> Result<Self> {
        RawParams { beta, ..self.raw }.check_positive()
    }

    /// Same parameters at `beta = beta_1 + mu`.
    pub fn with_mu(&self, mu: f64) -> Result<Self> {
        self.with_beta(self.beta1() + mu)
    }

    pub fn beta1(&self) -> f64 {
        let (d1, d2) = self.effective_diffusion();
        1.0 + self.raw.alpha * self.raw.alpha + d1 + d2
    }

    pub fn onset(&self) -> OnsetData {
        let a2 = self.raw.alpha * self.raw.alpha;
        let (d1, d2) = self.effective_diffusion();
        let beta1 = 1.0 + a2 + d1 + d2;
        let omega_squared = a2 * (1.0 + d1 - d2) - d2 * d2;
        let root = 1.0 + self.raw.alpha * (self.raw.delta1 / self.raw.delta2).sqrt();
        let assumption_bound = root * root;
        OnsetData {
            beta1,
            omega: omega_squared.max(0.0).sqrt(),
            omega_squared,
            mu: self.raw.beta - beta1,
            assumption_bound,
            admissible: beta1 < assumption_bound && omega_squared > 0.0,
        }
    }

    pub fn require_admissible(&self) -> Result<OnsetData> {
        let onset = self.onset();
        if onset.omega_squared <= 0.0 {
            return Err(Error::InadmissibleRegime {
                reason: format!("omega^2 = {} is not positive", onset.omega_squared),
            });
        }
        if onset.beta1 >= onset.assumption_bound {
            return Err(Error::InadmissibleRegime {
                reason: format!(
                    "beta1 = {} is not below (1 + alpha sqrt(delta1/delta2))^2 = {}",
                    onset.beta1, onset.assumption_bound
                ),
            });
        }
        Ok(onset)
    }
}

/// Free function form of [`ModelParams::onset`].
pub fn onset(params: &ModelParams) -> OnsetData {
    params.onset()
}

/// Canonical worked example: `alpha = 2`, `delta1 = delta2 = 1`, `beta = beta_1 = 7`.
pub fn canonical() -> ModelParams {
    RawParams::new(2.0, 7.0, 1.0, 1.0)
        .validate()
        .expect("canonical parameters are admissible")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_onset() {
        let o = canonical().onset();
        assert_eq!(o.beta1, 7.0);
        assert!((o.omega - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(o.mu, 0.0);
        assert!(o.admissible);
    }

    #[test]
    fn mu_is_beta_minus_beta1() {
        let p = RawParams::new(2.0, 7.1, 1.0, 1.0).validate().unwrap();
        assert!((p.onset().mu - 0.1).abs() < 1e-14);
    }

    #[test]
    fn hand_substituted_case() {
        let p = RawParams::new(3.0, 13.0, 2.0, 1.0).check_positive().unwrap();
        let o = p.onset();
        assert_eq!(o.beta1, 13.0);
        assert_eq!(o.omega_squared, 17.0);
    }

    #[test]
    fn omega_squared_zero_is_rejected() {
        let raw = RawParams::new(1.0, 1.0, 1.0, 1.0);
        let p = raw.check_positive().unwrap();
        assert_eq!(p.onset().omega_squared, 0.0);
        assert!(!p.onset().admissible);
        assert!(matches!(raw.validate(), Err(Error::InadmissibleRegime { .. })));
    }

    #[test]
    fn zero_delta1_names_the_field() {
        let err = RawParams::new(2.0, 7.0, 0.0, 1.0).validate().unwrap_err();
        assert_eq!(
            err,
            Error::NonPositiveParameter {
                field: "delta1",
                value: 0.0
            }
        );
    }

    #[test]
    fn nan_is_rejected() {
        let err = RawParams::new(f64::NAN, 7.0, 1.0, 1.0).check_positive().unwrap_err();
        assert!(matches!(err, Error::NonPositiveParameter { field: "alpha", .. }));
    }

    #[test]
    fn assumption_violation_is_flagged_not_fatal() {
        // delta1 small against delta2: the uniform bound fails.
        let p = RawParams::new(2.0, 7.0, 0.1, 3.0).check_positive().unwrap();
        let o = p.onset();
        assert!(!o.admissible);
        assert!(p.require_admissible().is_err());
    }

    #[test]
    fn onset_is_bitwise_deterministic() {
        let p = RawParams::new(1.7, 5.3, 0.9, 0.4).check_positive().unwrap();
        let a = p.onset();
        let b = p.onset();
        assert_eq!(a.beta1.to_bits(), b.beta1.to_bits());
        assert_eq!(a.omega.to_bits(), b.omega.to_bits());
    }

    #[test]
    fn half_length_rescales_wave_numbers() {
        let raw = RawParams {
            half_length: PI / 2.0,
            ..RawParams::new(2.0, 7.0, 1.0, 1.0)
        };
        let p = raw.check_positive().unwrap();
        assert!((p.kappa() - 2.0).abs() < 1e-15);
        assert!((p.beta1() - (1.0 + 4.0 + 4.0 * 2.0)).abs() < 1e-12);
    }
}
