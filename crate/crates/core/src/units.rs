//! Laboratory units to reduced coordinates and back.
//!
//! Lengths are measured in the thermal length l = ħc/(k_B T), times in l/c,
//! momenta in m·c. Mass only travels along: none of the reduced coordinates
//! depend on it once momentum is expressed as a speed ratio.

use crate::constants::{fine_structure, thermal_length, MAX_SPEED, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::vec3::{cos_between, Vec3};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConfig {
    /// Bath temperature in kelvin.
    pub temperature: f64,
    /// Particle mass in electron masses.
    pub mass: f64,
    pub charge_number: i32,
    /// Momentum in units of m·c.
    pub momentum: Vec3,
    /// y = x − x′ in meters.
    pub separation: Vec3,
    /// Elapsed time in seconds.
    pub time: f64,
}

impl PhysicalConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::NonPositiveTemperature(self.temperature));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::NonPositiveMass(self.mass));
        }
        if !(self.time >= 0.0 && self.time.is_finite()) {
            return Err(Error::NegativeTime(self.time));
        }
        check_speed(self.momentum.norm())?;
        if !self.separation.is_finite() {
            return Err(Error::InvalidArgument("separation must be finite".into()));
        }
        Ok(())
    }
}

/// Rejects speeds outside [0, MAX_SPEED).
pub fn check_speed(v: f64) -> Result<()> {
    if v.is_finite() && (0.0..MAX_SPEED).contains(&v) {
        Ok(())
    } else {
        Err(Error::Relativistic {
            speed: v,
            limit: MAX_SPEED,
        })
    }
}

/// Orientation data the scalar coordinates cannot carry: directions and the
/// sign of the charge. Only needed to invert the map exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub p_dir: Vec3,
    pub y_dir: Vec3,
    pub charge_number: i32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessPoint {
    /// z²·e²/(ħc).
    pub alpha_eff: f64,
    /// |p|/(mc).
    pub v: f64,
    pub tau_hat: f64,
    pub y_hat: f64,
    /// Cosine between p and y; 0 when either vanishes.
    pub cos_py: f64,
    /// Thermal length in meters.
    pub l_db: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame: Option<Frame>,
}

impl DimensionlessPoint {
    /// Point without a physical anchor; `l_db` is set to 1.
    pub fn new(alpha_eff: f64, v: f64, tau_hat: f64, y_hat: f64, cos_py: f64) -> Result<Self> {
        let pt = DimensionlessPoint {
            alpha_eff,
            v,
            tau_hat,
            y_hat,
            cos_py,
            l_db: 1.0,
            frame: None,
        };
        pt.validate()?;
        Ok(pt)
    }

    /// Separation parallel to the momentum.
    pub fn aligned(alpha_eff: f64, v: f64, tau_hat: f64, y_hat: f64) -> Result<Self> {
        Self::new(alpha_eff, v, tau_hat, y_hat, 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, x: f64| {
            Err(Error::InvalidArgument(format!("{what} must be finite and non-negative, got {x}")))
        };
        if !(self.alpha_eff >= 0.0 && self.alpha_eff.is_finite()) {
            return bad("alpha_eff", self.alpha_eff);
        }
        if !(self.tau_hat >= 0.0 && self.tau_hat.is_finite()) {
            return bad("tau_hat", self.tau_hat);
        }
        if !(self.y_hat >= 0.0 && self.y_hat.is_finite()) {
            return bad("y_hat", self.y_hat);
        }
        if !(-1.0..=1.0).contains(&self.cos_py) {
            return Err(Error::InvalidArgument(format!(
                "cos_py must lie in [-1, 1], got {}",
                self.cos_py
            )));
        }
        if !(self.l_db > 0.0 && self.l_db.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "l_dB must be positive, got {}",
                self.l_db
            )));
        }
        check_speed(self.v)
    }

    /// Same point with a different reduced time.
    pub fn with_tau(mut self, tau_hat: f64) -> Self {
        self.tau_hat = tau_hat;
        self
    }

    /// Same point with a different reduced separation.
    pub fn with_y(mut self, y_hat: f64) -> Self {
        self.y_hat = y_hat;
        self
    }
}

pub fn to_dimensionless(cfg: &PhysicalConfig) -> Result<DimensionlessPoint> {
    cfg.validate()?;
    let l = thermal_length(cfg.temperature);
    let z = f64::from(cfg.charge_number);
    Ok(DimensionlessPoint {
        alpha_eff: z * z * fine_structure(),
        v: cfg.momentum.norm(),
        tau_hat: SPEED_OF_LIGHT * cfg.time / l,
        y_hat: cfg.separation.norm() / l,
        cos_py: cos_between(cfg.momentum, cfg.separation),
        l_db: l,
        frame: Some(Frame {
            p_dir: cfg.momentum.unit_or_zero(),
            y_dir: cfg.separation.unit_or_zero(),
            charge_number: cfg.charge_number,
        }),
    })
}

/// Inverse map at the given temperature and mass.
///
/// Without a frame the momentum is placed along z, the separation in the x–z
/// plane at the stored angle, and the charge is taken positive.
pub fn from_dimensionless(pt: &DimensionlessPoint, temperature: f64, mass: f64) -> Result<PhysicalConfig> {
    if !(temperature > 0.0 && temperature.is_finite()) {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(Error::NonPositiveMass(mass));
    }
    pt.validate()?;
    let l = thermal_length(temperature);
    let (p_dir, y_dir, charge_number) = match pt.frame {
        Some(f) => (f.p_dir, f.y_dir, f.charge_number),
        None => {
            let sin = (1.0 - pt.cos_py * pt.cos_py).max(0.0).sqrt();
            let z = (pt.alpha_eff / fine_structure()).sqrt().round() as i32;
            (Vec3::Z, Vec3::new(sin, 0.0, pt.cos_py), z)
        }
    };
    let cfg = PhysicalConfig {
        temperature,
        mass,
        charge_number,
        momentum: p_dir * pt.v,
        separation: y_dir * (pt.y_hat * l),
        time: pt.tau_hat * l / SPEED_OF_LIGHT,
    };
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn electron(t: f64, time: f64) -> PhysicalConfig {
        PhysicalConfig {
            temperature: t,
            mass: 1.0,
            charge_number: 1,
            momentum: Vec3::new(0.0, 0.0, 0.01),
            separation: Vec3::new(1e-6, 0.0, 2e-6),
            time,
        }
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) + 1e-300
    }

    #[test]
    fn room_temperature_point() {
        let pt = to_dimensionless(&electron(300.0, 1e-12)).unwrap();
        assert!((pt.l_db / 7.63e-6 - 1.0).abs() < 1e-3, "{}", pt.l_db);
        assert!((pt.alpha_eff - 7.2974e-3).abs() < 1e-7);
        assert_eq!(pt.v, 0.01);
    }

    #[test]
    fn zero_cases() {
        let mut cfg = electron(300.0, 0.0);
        cfg.separation = Vec3::ZERO;
        let pt = to_dimensionless(&cfg).unwrap();
        assert_eq!(pt.tau_hat, 0.0);
        assert_eq!(pt.y_hat, 0.0);
        assert_eq!(pt.cos_py, 0.0);
        let back = from_dimensionless(&pt, 300.0, 1.0).unwrap();
        assert_eq!(back.time, 0.0);
    }

    #[test]
    fn unit_separation_is_one_thermal_length() {
        let pt = DimensionlessPoint::aligned(0.0, 0.0, 0.0, 1.0).unwrap();
        let cfg = from_dimensionless(&pt, 300.0, 1.0).unwrap();
        assert!(close(cfg.separation.norm(), thermal_length(300.0)));
    }

    #[test]
    fn distinct_diagnostics() {
        let mut c = electron(300.0, 1.0);
        c.temperature = 0.0;
        assert!(matches!(to_dimensionless(&c), Err(Error::NonPositiveTemperature(_))));
        let mut c = electron(300.0, -1.0);
        c.time = -1.0;
        assert!(matches!(to_dimensionless(&c), Err(Error::NegativeTime(_))));
        let mut c = electron(300.0, 1.0);
        c.momentum = Vec3::new(0.0, 0.1, 0.0);
        assert!(matches!(to_dimensionless(&c), Err(Error::Relativistic { .. })));
        let pt = to_dimensionless(&electron(300.0, 1.0)).unwrap();
        assert!(from_dimensionless(&pt, -3.0, 1.0).is_err());
        assert!(from_dimensionless(&pt, 3.0, 0.0).is_err());
    }

    #[test]
    fn frameless_inverse_keeps_scalars() {
        let pt = DimensionlessPoint::new(4.0 * fine_structure(), 0.02, 3.0, 5.0, -0.5).unwrap();
        let cfg = from_dimensionless(&pt, 77.0, 3.0).unwrap();
        assert_eq!(cfg.charge_number, 2);
        let again = to_dimensionless(&cfg).unwrap();
        assert!(close(again.y_hat, 5.0));
        assert!(close(again.tau_hat, 3.0));
        assert!((again.cos_py + 0.5).abs() < 1e-12);
        assert!(close(again.alpha_eff, pt.alpha_eff));
    }

    #[test]
    fn thermal_length_monotone() {
        let ts = [1e-3, 0.1, 4.2, 77.0, 300.0, 1e4];
        for w in ts.windows(2) {
            assert!(thermal_length(w[0]) > thermal_length(w[1]));
        }
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0).prop_map(|(x, y, z)| Vec3::new(x, y, z))
    }

    proptest! {
        #[test]
        fn round_trip_twelve_digits(
            t in 1e-2f64..1e5,
            mass in 1e-2f64..1e5,
            z in -5i32..=5,
            pdir in vec3(),
            speed in 0.0f64..0.0999,
            ydir in vec3(),
            ylen in 0.0f64..1e-2,
            time in 0.0f64..1e-6,
        ) {
            let cfg = PhysicalConfig {
                temperature: t,
                mass,
                charge_number: z,
                momentum: pdir.unit_or_zero() * speed,
                separation: ydir.unit_or_zero() * ylen,
                time,
            };
            let back = from_dimensionless(&to_dimensionless(&cfg).unwrap(), t, mass).unwrap();
            prop_assert_eq!(back.charge_number, z);
            prop_assert!(close(back.time, time));
            for (a, b) in [(back.momentum, cfg.momentum), (back.separation, cfg.separation)] {
                let scale = b.norm();
                prop_assert!((a - b).norm() <= 1e-12 * scale + 1e-300);
            }
        }

        #[test]
        fn tau_increases_with_time(t in 1.0f64..1e3, a in 0.0f64..1e-9, d in 1e-15f64..1e-9) {
            let p1 = to_dimensionless(&electron(t, a)).unwrap();
            let p2 = to_dimensionless(&electron(t, a + d)).unwrap();
            prop_assert!(p2.tau_hat > p1.tau_hat);
        }
    }
}
