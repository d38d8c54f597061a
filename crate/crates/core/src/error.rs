//! Error type shared by all modules of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by construction, integration, solving and simulation.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A distribution failed validation at construction.
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// A function could not be evaluated at a point carrying positive mass.
    #[error("function not evaluable at t = {at}: {reason}")]
    NonEvaluable { at: f64, reason: String },

    /// The atomic oracle was asked to integrate against a law with density pieces.
    #[error("atomic oracle requires a purely atomic law, but the distribution has density pieces")]
    NotAtomic,

    /// An integral that must converge did not (last truncation {value}).
    #[error("integral failed to converge (last truncation {value}, error estimate {error_estimate})")]
    DivergentIntegral { value: f64, error_estimate: f64 },

    /// H fails local dG-integrability on a compact of the time set.
    #[error("function is not locally dG-integrable (first failure near t = {at})")]
    NotLocallyIntegrable { at: f64 },

    /// Case B requires dG-integrability over the whole closed support.
    #[error("Case B requires the function to be dG-integrable up to the endpoint t_G = {t_g}")]
    CaseBNonIntegrable { t_g: f64 },

    /// Case A construction needs an initial value F(0).
    #[error("Case A leaves F(0) free: an initial value must be supplied")]
    MissingInitialValue,

    /// The limit of F·Ḡ fell inside the indeterminate band around zero.
    #[error(
        "limit of F·Ḡ = {value} lies in the indeterminate band (|value| in ({low:e}, {high:e})); \
         tighten tolerances or supply a declared verdict"
    )]
    IndeterminateLimit { value: f64, low: f64, high: f64 },

    /// The conditional-mean function K vanished where positivity is required.
    #[error("K(t) must stay positive on the integration range; found K({at}) = {value}")]
    VanishingK { at: f64, value: f64 },

    /// A deterministic component evaluated non-finite during simulation.
    #[error("non-finite {what} at t = {at}; the pair is misconfigured for this law")]
    NonFiniteValue { what: String, at: f64 },

    /// A module precondition was violated by the caller.
    #[error("precondition failed: {0}")]
    Precondition(String),
}
