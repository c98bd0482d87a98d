use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{field}` must be strictly positive (got {value})")]
    NonPositiveParameter { field: &'static str, value: f64 },

    #[error("inadmissible regime: {reason}")]
    InadmissibleRegime { reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("singular 2x2 system for {equation} (|det| = {det:e})")]
    SingularSystem { equation: &'static str, det: f64 },

    #[error("route {route} is not defined for coefficient {coefficient}")]
    UnsupportedRoute {
        coefficient: &'static str,
        route: &'static str,
    },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integration stopped at t = {t}: {reason}")]
    IntegrationFailed { t: f64, reason: String },

    #[error("numerical blowup at t = {t}: field norm {norm:e} exceeds {bound:e}")]
    NumericalBlowup { t: f64, norm: f64, bound: f64 },

    #[error("window too short: {periods:.2} oscillation periods sampled, need at least 3")]
    WindowTooShort { periods: f64 },

    #[error("no saturation for mu = {mu}: {detail}")]
    NoSaturation { mu: f64, detail: String },
}

impl Error {
    /// True for errors caused by bad input rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NonPositiveParameter { .. }
                | Error::InadmissibleRegime { .. }
                | Error::InvalidArgument(_)
                | Error::DomainMismatch(_)
                | Error::UnsupportedRoute { .. }
        )
    }

    /// Short machine-readable code used in sweep rows.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonPositiveParameter { .. } => "non_positive_parameter",
            Error::InadmissibleRegime { .. } => "inadmissible_regime",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::DomainMismatch(_) => "domain_mismatch",
            Error::SingularSystem { .. } => "singular_system",
            Error::UnsupportedRoute { .. } => "unsupported_route",
            Error::StepSizeUnderflow { .. } => "step_size_underflow",
            Error::IntegrationFailed { .. } => "integration_failed",
            Error::NumericalBlowup { .. } => "numerical_blowup",
            Error::WindowTooShort { .. } => "window_too_short",
            Error::NoSaturation { .. } => "no_saturation",
        }
    }
}
