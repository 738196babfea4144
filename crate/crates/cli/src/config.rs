//! Run configuration: TOML file, then command-line overrides.

use crate::error::CliError;
use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thermal_decoherence::constants::ELECTRON_MASS;
use thermal_decoherence::units::PhysicalConfig;
use thermal_decoherence::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Reduced,
    Regime,
    All,
}

impl Method {
    pub fn exact(self) -> bool {
        matches!(self, Method::Exact | Method::All)
    }
    pub fn reduced(self) -> bool {
        matches!(self, Method::Reduced | Method::All)
    }
    pub fn regime(self) -> bool {
        matches!(self, Method::Regime | Method::All)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

/// Either an explicit list or `{ start, stop, count, scale }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        scale: Scale,
    },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Range { start, stop, count, scale } => {
                if count == 1 {
                    return vec![start];
                }
                let last = (count - 1) as f64;
                (0..count)
                    .map(|i| {
                        let f = i as f64 / last;
                        match scale {
                            Scale::Linear => start + (stop - start) * f,
                            Scale::Log => (start.ln() + (stop.ln() - start.ln()) * f).exp(),
                        }
                    })
                    .collect()
            }
        }
    }

    pub fn validate(&self, name: &str) -> Result<Vec<f64>, CliError> {
        if let Grid::Range { start, stop, scale: Scale::Log, .. } = *self {
            if !(start > 0.0 && stop > 0.0) {
                return Err(CliError::Config(format!("{name}: log grid needs positive endpoints")));
            }
        }
        let v = self.values();
        if v.is_empty() {
            return Err(CliError::Config(format!("{name}: grid is empty")));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Config(format!("{name}: grid has non-finite values")));
        }
        let up = v.windows(2).all(|w| w[1] > w[0]);
        let down = v.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return Err(CliError::Config(format!("{name}: grid must be strictly monotone")));
        }
        Ok(v)
    }
}

/// Sweep axes. Reduced axes (`tau_hat`, `y_hat`) and physical axes
/// (`temperature`, `time`, `separation`) are mutually exclusive; when none
/// is given the sweep covers τ̂, ŷ ∈ {0.1, 1, 10}.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub tau_hat: Option<Grid>,
    pub y_hat: Option<Grid>,
    /// |p|/(mc); defaults to the physical momentum.
    pub v: Option<f64>,
    /// z²α; defaults to the physical charge.
    pub alpha: Option<f64>,
    pub cos_py: Option<f64>,
    /// Kelvin.
    pub temperature: Option<Grid>,
    /// Seconds.
    pub time: Option<Grid>,
    /// |y| in meters, along the direction of `physical.separation`.
    pub separation: Option<Grid>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScreenConfig {
    pub tau_hat: f64,
    pub dv: f64,
    /// Screen positions in thermal lengths.
    pub x: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VisibilityConfig {
    pub tau_hat: Grid,
    pub dv: Grid,
    pub alpha: Option<f64>,
    /// Envelope width in thermal lengths.
    pub packet_width: f64,
    /// mc²/(k_B T); defaults to the physical mass and temperature.
    pub phase_scale: Option<f64>,
    pub screen: Option<ScreenConfig>,
}

impl Default for VisibilityConfig {
    fn default() -> Self {
        VisibilityConfig {
            tau_hat: Grid::Values(vec![1.0, 10.0, 50.0]),
            dv: Grid::Values(vec![0.0, 0.005, 0.01]),
            alpha: None,
            packet_width: 1.0,
            phase_scale: None,
            screen: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WignerConfig {
    /// Gaussian slice exp(−a u²/2 + i p u).
    pub a: f64,
    pub p: f64,
    pub half_width: f64,
    /// Points on each side of u = 0.
    pub n: usize,
    pub k: Grid,
    pub b: f64,
    pub t: f64,
}

impl Default for WignerConfig {
    fn default() -> Self {
        WignerConfig {
            a: 1.0,
            p: 0.0,
            half_width: 20.0,
            n: 512,
            k: Grid::Range {
                start: -5.0,
                stop: 5.0,
                count: 201,
                scale: Scale::Linear,
            },
            b: 0.1,
            t: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub seed: u64,
    pub tol: f64,
    pub method: Method,
    pub out: PathBuf,
    pub quick: bool,
    pub physical: PhysicalConfig,
    pub sweep: SweepConfig,
    pub visibility: VisibilityConfig,
    pub wigner: WignerConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        let defaults = thermal_decoherence::validation::ValidateOptions::default();
        RunConfig {
            seed: defaults.seed,
            tol: defaults.tol,
            method: Method::All,
            out: PathBuf::from("out"),
            quick: false,
            physical: PhysicalConfig {
                temperature: 300.0,
                mass: 1.0,
                charge_number: 1,
                momentum: Vec3::new(0.0, 0.0, 0.01),
                separation: Vec3::new(0.0, 0.0, 1e-5),
                time: 1e-13,
            },
            sweep: SweepConfig::default(),
            visibility: VisibilityConfig::default(),
            wigner: WignerConfig::default(),
        }
    }
}

/// Values given on the command line; each replaces the file value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub tol: Option<f64>,
    pub method: Option<Method>,
    pub quick: bool,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Io {
                    path: p.to_path_buf(),
                    source: e,
                })?;
                toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(out) = &overrides.out {
            cfg.out = out.clone();
        }
        if let Some(seed) = overrides.seed {
            cfg.seed = seed;
        }
        if let Some(tol) = overrides.tol {
            cfg.tol = tol;
        }
        if let Some(m) = overrides.method {
            cfg.method = m;
        }
        cfg.quick |= overrides.quick;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(CliError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        self.physical.validate()?;
        for (name, g) in [
            ("sweep.tau_hat", &self.sweep.tau_hat),
            ("sweep.y_hat", &self.sweep.y_hat),
            ("sweep.temperature", &self.sweep.temperature),
            ("sweep.time", &self.sweep.time),
            ("sweep.separation", &self.sweep.separation),
        ] {
            if let Some(g) = g {
                g.validate(name)?;
            }
        }
        let reduced = self.sweep.tau_hat.is_some() || self.sweep.y_hat.is_some();
        let physical = self.sweep.temperature.is_some() || self.sweep.time.is_some() || self.sweep.separation.is_some();
        if reduced && physical {
            return Err(CliError::Config(
                "sweep: reduced axes (tau_hat, y_hat) and physical axes (temperature, time, separation) cannot be mixed".into(),
            ));
        }
        self.visibility.tau_hat.validate("visibility.tau_hat")?;
        self.visibility.dv.validate("visibility.dv")?;
        if !(self.visibility.packet_width > 0.0) {
            return Err(CliError::Config("visibility.packet_width must be positive".into()));
        }
        if let Some(s) = &self.visibility.screen {
            s.x.validate("visibility.screen.x")?;
        }
        self.wigner.k.validate("wigner.k")?;
        if !(self.wigner.a > 0.0) || self.wigner.n < 2 || !(self.wigner.half_width > 0.0) {
            return Err(CliError::Config("wigner: need a > 0, n >= 2 and half_width > 0".into()));
        }
        if !(self.wigner.b >= 0.0 && self.wigner.t >= 0.0) {
            return Err(CliError::Config("wigner: b and t must be non-negative".into()));
        }
        Ok(())
    }

    /// z²α from the physical charge.
    pub fn alpha_eff(&self) -> f64 {
        let z = self.physical.charge_number as f64;
        z * z * thermal_decoherence::constants::fine_structure()
    }

    /// mc²/(k_B T) from the physical mass and temperature.
    pub fn phase_scale(&self) -> f64 {
        use thermal_decoherence::constants::{BOLTZMANN, SPEED_OF_LIGHT};
        self.physical.mass * ELECTRON_MASS * SPEED_OF_LIGHT * SPEED_OF_LIGHT / (BOLTZMANN * self.physical.temperature)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_grid_endpoints() {
        let g = Grid::Range {
            start: 0.01,
            stop: 1.0,
            count: 3,
            scale: Scale::Log,
        };
        let v = g.validate("g").unwrap();
        assert!((v[1] - 0.1).abs() < 1e-15 && (v[2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::Values(vec![]).validate("g").is_err());
        assert!(Grid::Values(vec![1.0, 1.0]).validate("g").is_err());
        assert!(Grid::Values(vec![3.0, 2.0, 1.0]).validate("g").is_ok());
        let log = Grid::Range {
            start: 0.0,
            stop: 1.0,
            count: 4,
            scale: Scale::Log,
        };
        assert!(log.validate("g").is_err());
    }

    #[test]
    fn toml_round_trip_and_mixing() {
        let text = "seed = 5\n[sweep]\ntau_hat = { start = 0.1, stop = 10.0, count = 3, scale = \"log\" }\ny_hat = [100.0]\n";
        let cfg: RunConfig = toml::from_str(text).unwrap();
        assert_eq!(cfg.seed, 5);
        cfg.validate().unwrap();
        let mixed: RunConfig = toml::from_str("[sweep]\ny_hat = [1.0]\ntime = [1e-12]\n").unwrap();
        assert!(mixed.validate().is_err());
        assert!(toml::from_str::<RunConfig>("bogus = 1\n").is_err());
    }
}
