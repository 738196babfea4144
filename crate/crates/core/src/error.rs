use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("temperature must be positive, got {0} K")]
    NonPositiveTemperature(f64),

    #[error("mass must be positive, got {0} electron masses")]
    NonPositiveMass(f64),

    #[error("time must be non-negative, got {0} s")]
    NegativeTime(f64),

    #[error("speed |p|/mc = {speed} is outside the non-relativistic window (< {limit})")]
    Relativistic { speed: f64, limit: f64 },

    #[error("non-integrable Bose integral: power {power} with {trig}")]
    NonIntegrable { power: i32, trig: &'static str },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what}: tolerance {tol:e} not reached within budget of {cap} (best error {achieved:e})")]
    BudgetExceeded {
        what: &'static str,
        tol: f64,
        cap: usize,
        achieved: f64,
    },

    #[error("oscillation frequency {frequency} exceeds the panel budget cap {cap}")]
    OscillationCap { frequency: f64, cap: f64 },

    #[error("decoherence exponent {value:e} is negative beyond tolerance {tol:e}")]
    NegativeExponent { value: f64, tol: f64 },

    #[error("density slice is not Hermitian (residual {residual:e})")]
    NonHermitian { residual: f64 },

    #[error("k range up to {k_max} exceeds the Nyquist limit {limit} of the u grid")]
    Nyquist { k_max: f64, limit: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("ensemble must contain at least one particle")]
    EmptyEnsemble,
}

impl Error {
    /// True for failures caused by quadrature or series budgets rather than bad input.
    pub fn is_numeric_budget(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::OscillationCap { .. } | Error::NegativeExponent { .. }
        )
    }
}
