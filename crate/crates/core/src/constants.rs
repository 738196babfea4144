//! Pinned physical constants and the catalog of resolved order-one coefficients.
//!
//! All values are CODATA 2018 (SI 2019 redefinition: `e`, `ħ` via `h`, `c` and
//! `k_B` are exact). Nothing in the crate reads constants from elsewhere, so
//! every derived number is reproducible bit-for-bit from this table.

use sha2::{Digest, Sha256};
use std::f64::consts::PI;

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Reduced Planck constant, J·s (h/2π with exact h).
pub const HBAR: f64 = 1.054_571_817e-34;
/// Elementary charge, C (exact).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// Electron mass, kg.
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;

/// Upper bound on |p|/(mc) accepted anywhere in the crate.
pub const MAX_SPEED: f64 = 0.1;

/// ħc in J·m.
pub fn hbar_c() -> f64 {
    HBAR * SPEED_OF_LIGHT
}

/// Fine-structure constant e²/(4πε₀ħc).
pub fn fine_structure() -> f64 {
    ELEMENTARY_CHARGE * ELEMENTARY_CHARGE / (4.0 * PI * VACUUM_PERMITTIVITY * hbar_c())
}

/// Thermal length ħc/(k_B T) in meters.
pub fn thermal_length(temperature: f64) -> f64 {
    hbar_c() / (BOLTZMANN * temperature)
}

/// The pinned table as (name, value) pairs, in a fixed order.
pub fn table() -> [(&'static str, f64); 6] {
    [
        ("speed_of_light_m_per_s", SPEED_OF_LIGHT),
        ("hbar_J_s", HBAR),
        ("elementary_charge_C", ELEMENTARY_CHARGE),
        ("boltzmann_J_per_K", BOLTZMANN),
        ("vacuum_permittivity_F_per_m", VACUUM_PERMITTIVITY),
        ("electron_mass_kg", ELECTRON_MASS),
    ]
}

/// SHA-256 over the canonical text form of [`table`], hex encoded.
///
/// Embedded in every output file so results can be traced to the constants
/// that produced them.
pub fn table_hash() -> String {
    let mut hasher = Sha256::new();
    for (name, value) in table() {
        hasher.update(format!("{name}={value:?}\n").as_bytes());
    }
    hex::encode(hasher.finalize())
}

/// One resolved order-one coefficient of the decoherence exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficient {
    pub name: &'static str,
    pub expression: &'static str,
    pub value: f64,
    pub context: &'static str,
}

/// Short-time, large-separation coefficient of S/(αv²τ̂²).
pub const SMALL_T_LARGE_Y: f64 = 2.0 * PI / 9.0;
/// Same coefficient as it would follow from a prefactor half as large.
pub const SMALL_T_LARGE_Y_HALF: f64 = PI / 9.0;
/// Prefactor of L(τ̂) in the large-separation law.
pub const LARGE_Y_PREFACTOR: f64 = 4.0 / (3.0 * PI);
/// Coefficient of αv²τ̂²ŷ² at short time and small separation.
pub const SMALL_T_SMALL_Y: f64 = 2.0 * PI * PI * PI / 225.0;
/// Stationary small-separation coefficient of αv²ŷ².
pub const STATIONARY_SMALL_Y: f64 = 2.0 * PI / 45.0;
/// Same coefficient as it would follow from a prefactor half as large.
pub const STATIONARY_SMALL_Y_HALF: f64 = PI / 45.0;
/// Large-separation stationary slope of S/(αv²) in ŷ.
pub const STATIONARY_LARGE_Y_SLOPE: f64 = 0.5;
/// Prefactor of αΔv²L(τ̂) in the interference exponent.
pub const INTERFERENCE_PREFACTOR: f64 = 2.0 / (3.0 * PI);
/// Short-time interference coefficient of αΔv²τ̂².
pub const INTERFERENCE_SMALL_T: f64 = PI / 9.0;
/// Interference prefactor with the one-quarter normalization (rejected by quadrature).
pub const INTERFERENCE_PREFACTOR_QUARTER: f64 = 1.0 / (3.0 * PI);
/// Short-time interference coefficient with the one-quarter normalization.
pub const INTERFERENCE_SMALL_T_QUARTER: f64 = PI / 18.0;

pub fn coefficient_catalog() -> Vec<Coefficient> {
    vec![
        Coefficient {
            name: "small_t_large_y",
            expression: "2π/9",
            value: SMALL_T_LARGE_Y,
            context: "S/(αv²τ̂²) for τ̂ ≪ 1, ŷ ≫ 1; coincidence kernel 2π/9 = (4/3π)ζ(2)",
        },
        Coefficient {
            name: "large_y_prefactor",
            expression: "4/(3π)",
            value: LARGE_Y_PREFACTOR,
            context: "S = (4/3π)αv²·ln(sinh(πτ̂)/(πτ̂)) for ŷ ≫ 1; large-τ̂ slope 4/3",
        },
        Coefficient {
            name: "small_t_small_y",
            expression: "2π³/225",
            value: SMALL_T_SMALL_Y,
            context: "S/(αv²τ̂²ŷ²) for τ̂, ŷ ≪ 1; uses ∫k³/(e^k−1) = π⁴/15",
        },
        Coefficient {
            name: "stationary_small_y",
            expression: "2π/45",
            value: STATIONARY_SMALL_Y,
            context: "S/(αv²ŷ²) at the τ̂ → ∞ plateau for ŷ ≪ 1",
        },
        Coefficient {
            name: "stationary_large_y_slope",
            expression: "1/2",
            value: STATIONARY_LARGE_Y_SLOPE,
            context: "S/(αv²ŷ) at the τ̂ → ∞ plateau for ŷ ≫ 1; from ∫₀¹μ(1−μ²)dμ = 1/4",
        },
        Coefficient {
            name: "interference_prefactor",
            expression: "2/(3π)",
            value: INTERFERENCE_PREFACTOR,
            context: "S₁₂ = (2/3π)αΔv²·ln(sinh(πτ̂)/(πτ̂)); half the single-packet law",
        },
        Coefficient {
            name: "interference_small_t",
            expression: "π/9",
            value: INTERFERENCE_SMALL_T,
            context: "S₁₂/(αΔv²τ̂²) for τ̂ ≪ 1",
        },
        Coefficient {
            name: "interference_prefactor_quarter",
            expression: "1/(3π)",
            value: INTERFERENCE_PREFACTOR_QUARTER,
            context: "quarter-normalized visibility prefactor; not supported by first-principles quadrature",
        },
        Coefficient {
            name: "interference_small_t_quarter",
            expression: "π/18",
            value: INTERFERENCE_SMALL_T_QUARTER,
            context: "quarter-normalized short-time visibility coefficient; not supported",
        },
    ]
}
