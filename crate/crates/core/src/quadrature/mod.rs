//! Numerical integration: fixed rules, a globally adaptive driver, and the
//! Planck-weighted integral engines built on them.

mod adaptive;
mod bose;
mod rules;

pub use adaptive::{integrate, uniform_breakpoints, AdaptiveOptions, Integral};
pub use bose::{
    bose_adaptive, bose_adaptive_with, bose_series, bose_series_with, coth_sin_identity,
    planck_adaptive, planck_adaptive_rel, planck_cutoff, BoseIntegralSpec, Envelope, QuadratureConfig,
    QuadratureMethod, QuadratureResult, Trig,
};
pub use rules::gauss_legendre;
