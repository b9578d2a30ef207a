//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A caller-supplied value is outside the operation's domain.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The noise half-width must lie in (0, π]; at ε = 0 the closed
    /// coefficients are 0/0 and the walk spreads ballistically, so there is
    /// no diffusion constant to report.
    #[error("noise half-width must lie in (0, pi], got {0}")]
    EpsilonOutOfDomain(f64),

    /// |γ| ≥ |δ| in the rational form of the diffusion integrand; the
    /// standard-integral reduction does not apply.
    #[error("degenerate diffusion integrand: |gamma| = {gamma:e} >= |delta| = {delta:e}")]
    DegenerateGammaForm { gamma: f64, delta: f64 },

    /// Not enough populated lattice sites to fit a profile shape.
    #[error("insufficient profile support: {got} usable sites, need {need}")]
    InsufficientSupport { got: usize, need: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidArgument(format!("{name} must be finite, got {value}")))
    }
}

pub(crate) fn ensure_epsilon(epsilon: f64) -> Result<f64> {
    if epsilon.is_finite() && epsilon > 0.0 && epsilon <= std::f64::consts::PI {
        Ok(epsilon)
    } else {
        Err(Error::EpsilonOutOfDomain(epsilon))
    }
}
