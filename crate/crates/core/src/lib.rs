pub mod constants;
pub mod decoherence;
pub mod error;
pub mod greens;
pub mod interference;
pub mod oracles;
pub mod quadrature;
pub mod special;
pub mod units;
pub mod validation;
pub mod vec3;
pub mod wigner;

pub use error::{Error, Result};
pub use vec3::Vec3;
