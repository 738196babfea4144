//! The decoherence exponent S of the off-diagonal density matrix.
//!
//! Three evaluators of increasing approximation:
//!
//! * [`s_exact`]: the full double-time integral of three kernel terms with the
//!   straight-line drift u·v·p̂ inside every spatial argument.
//! * [`s_reduced`]: drift dropped and y ∥ p, one radial integral.
//! * the closed forms [`s_large_y`], [`s_small_t_small_y`], [`s_stationary`].
//!
//! Tolerances passed to the quadrature evaluators are absolute tolerances on
//! S/(αv²), the exponent per unit coupling and squared speed.

use crate::constants::{LARGE_Y_PREFACTOR, SMALL_T_SMALL_Y};
use crate::error::{Error, Result};
use crate::greens::{kernel_combination, KernelTerm};
use crate::quadrature::{
    gauss_legendre, integrate, planck_adaptive_rel, uniform_breakpoints, AdaptiveOptions, Envelope,
    QuadratureConfig,
};
use crate::special::{one_minus_cos_over_sq, one_minus_three_j1_over_x, time_profile, x_over_expm1};
use crate::units::{check_speed, DimensionlessPoint};
use crate::vec3::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Default tolerance on S/(αv²).
pub const S_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeLabel {
    SmallTLargeY,
    LargeTLargeY,
    SmallTSmallY,
    LargeTSmallY,
    General,
}

impl RegimeLabel {
    pub fn name(self) -> &'static str {
        match self {
            RegimeLabel::SmallTLargeY => "small_t_large_y",
            RegimeLabel::LargeTLargeY => "large_t_large_y",
            RegimeLabel::SmallTSmallY => "small_t_small_y",
            RegimeLabel::LargeTSmallY => "large_t_small_y",
            RegimeLabel::General => "general",
        }
    }
}

impl fmt::Display for RegimeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SMethod {
    Exact,
    Reduced,
    LargeY,
    SmallTSmallY,
    Stationary,
}

impl SMethod {
    pub fn name(self) -> &'static str {
        match self {
            SMethod::Exact => "exact",
            SMethod::Reduced => "reduced",
            SMethod::LargeY => "large_y",
            SMethod::SmallTSmallY => "small_t_small_y",
            SMethod::Stationary => "stationary",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceResult {
    pub s_value: f64,
    pub method: SMethod,
    /// Absolute error bound on `s_value` (zero for closed forms).
    pub error_estimate: f64,
    pub regime_label: RegimeLabel,
    /// Set when a slightly negative quadrature result was clamped to zero.
    pub clamped: bool,
}

impl DecoherenceResult {
    fn closed(s_value: f64, method: SMethod, regime_label: RegimeLabel) -> Self {
        DecoherenceResult {
            s_value,
            method,
            error_estimate: 0.0,
            regime_label,
            clamped: false,
        }
    }

    /// exp(−S), the surviving fraction of the off-diagonal element.
    pub fn coherence(&self) -> f64 {
        (-self.s_value).exp()
    }
}

/// Threshold classification in (τ̂, ŷ); anything within [0.5, 2] of either is general.
pub fn regime_classify(tau_hat: f64, y_hat: f64) -> RegimeLabel {
    let band = |x: f64| (0.5..=2.0).contains(&x);
    if band(tau_hat) || band(y_hat) {
        return RegimeLabel::General;
    }
    match (tau_hat < 1.0, y_hat < 1.0) {
        (true, false) => RegimeLabel::SmallTLargeY,
        (false, false) => RegimeLabel::LargeTLargeY,
        (true, true) => RegimeLabel::SmallTSmallY,
        (false, true) => RegimeLabel::LargeTSmallY,
    }
}

/// Closed form matching the regime of `pt`, or `None` in the general band.
pub fn s_regime(pt: &DimensionlessPoint) -> Option<DecoherenceResult> {
    let label = regime_classify(pt.tau_hat, pt.y_hat);
    let r = match label {
        RegimeLabel::SmallTLargeY | RegimeLabel::LargeTLargeY => s_large_y(pt.tau_hat, pt.v, pt.alpha_eff),
        RegimeLabel::SmallTSmallY => s_small_t_small_y(pt.tau_hat, pt.y_hat, pt.v, pt.alpha_eff),
        RegimeLabel::LargeTSmallY => s_stationary(pt.y_hat, pt.v, pt.alpha_eff),
        RegimeLabel::General => return None,
    };
    Some(DecoherenceResult {
        regime_label: label,
        ..r
    })
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")))
    }
}

fn finish(reduced: f64, err: f64, pt: &DimensionlessPoint, tol: f64, method: SMethod) -> Result<DecoherenceResult> {
    let scale = pt.alpha_eff * pt.v * pt.v;
    let (value, clamped) = if reduced >= 0.0 {
        (reduced, false)
    } else if reduced > -tol.max(err) {
        (0.0, true)
    } else {
        return Err(Error::NegativeExponent { value: reduced * scale, tol: tol * scale });
    };
    Ok(DecoherenceResult {
        s_value: value * scale,
        method,
        error_estimate: err * scale,
        regime_label: regime_classify(pt.tau_hat, pt.y_hat),
        clamped,
    })
}

fn trivially_zero(pt: &DimensionlessPoint) -> bool {
    pt.alpha_eff == 0.0 || pt.v == 0.0 || pt.tau_hat == 0.0
}

/// S from the full double-time integral, drift included.
///
/// The momentum is placed along z and the separation at the angle given by
/// `cos_py`. The double integral over (s, τ) is folded to
/// 2∫₀^τ̂ (τ̂ − u) f(u) du using evenness of the kernel in time, with
/// f(u) = K(Δ) − ½K(y + Δ) − ½K(−y + Δ) and Δ = u·v·p̂.
pub fn s_exact(pt: &DimensionlessPoint, tol: f64) -> Result<DecoherenceResult> {
    pt.validate()?;
    check_tol(tol)?;
    if trivially_zero(pt) {
        return finish(0.0, 0.0, pt, tol, SMethod::Exact);
    }
    let t = pt.tau_hat;
    let p = Vec3::Z;
    let sin = (1.0 - pt.cos_py * pt.cos_py).max(0.0).sqrt();
    let y = Vec3::new(sin, 0.0, pt.cos_py) * pt.y_hat;
    let inner_tol = (0.25 * tol / (t * t).max(1.0)).max(1e-14);
    let v = pt.v;

    let mut failure = None;
    let mut inner_err = 0.0f64;
    let f = |u: f64| {
        if failure.is_some() {
            return 0.0;
        }
        let drift = p * (u * v);
        let terms = [
            KernelTerm::bilinear(1.0, p, p, drift),
            KernelTerm::bilinear(-0.5, p, p, y + drift),
            KernelTerm::bilinear(-0.5, p, p, -y + drift),
        ];
        match kernel_combination(&terms, u, inner_tol) {
            Ok(r) => {
                inner_err = inner_err.max(r.abs_error_estimate);
                2.0 * (t - u) * r.value
            }
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let breaks = uniform_breakpoints(0.0, t, 1.0);
    let opts = AdaptiveOptions {
        abs_tol: 0.5 * tol,
        rel_tol: 1e-10,
        max_panels: 10_000,
    };
    let outer = integrate(f, &breaks, opts, "s_exact");
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    let err = outer.error + t * t * inner_err;
    finish(outer.value, err, pt, tol, SMethod::Exact)
}

/// S with the drift dropped and y ∥ p:
/// (8/3π)αv² ∫dk n(k)/k (1 − cos kτ̂)(1 − 3j₁(kŷ)/(kŷ)).
///
/// `cos_py` is not used; this is the aligned geometry by construction.
pub fn s_reduced(pt: &DimensionlessPoint, tol: f64) -> Result<DecoherenceResult> {
    pt.validate()?;
    check_tol(tol)?;
    if trivially_zero(pt) || pt.y_hat == 0.0 {
        return finish(0.0, 0.0, pt, tol, SMethod::Reduced);
    }
    let (t, y) = (pt.tau_hat, pt.y_hat);
    let pref = 8.0 / (3.0 * PI);
    let integrand = |k: f64| x_over_expm1(k) * t * t * one_minus_cos_over_sq(k * t) * one_minus_three_j1_over_x(k * y);
    let env = Envelope {
        power: -1,
        amplitude: 4.0,
    };
    let r = planck_adaptive_rel(integrand, env, t + y, tol / pref, 1e-11, &QuadratureConfig::default())?;
    finish(pref * r.value, pref * r.abs_error_estimate, pt, tol, SMethod::Reduced)
}

/// (4/3π)·α·v²·L(τ̂), the separation-independent law for ŷ ≫ 1.
pub fn s_large_y(tau_hat: f64, v: f64, alpha: f64) -> DecoherenceResult {
    let label = if tau_hat < 1.0 {
        RegimeLabel::SmallTLargeY
    } else {
        RegimeLabel::LargeTLargeY
    };
    DecoherenceResult::closed(LARGE_Y_PREFACTOR * alpha * v * v * time_profile(tau_hat), SMethod::LargeY, label)
}

/// (2π³/225)·α·v²·τ̂²·ŷ².
pub fn s_small_t_small_y(tau_hat: f64, y_hat: f64, v: f64, alpha: f64) -> DecoherenceResult {
    let s = SMALL_T_SMALL_Y * alpha * v * v * tau_hat * tau_hat * y_hat * y_hat;
    DecoherenceResult::closed(s, SMethod::SmallTSmallY, RegimeLabel::SmallTSmallY)
}

/// Long-time plateau (2/π)·α·v²·∫₀¹(1 − μ²)·L(μŷ) dμ.
///
/// Composite 16-point Gauss–Legendre with panels no wider than 1/(2ŷ); the
/// error estimate is the change against half as many panels.
pub fn s_stationary(y_hat: f64, v: f64, alpha: f64) -> DecoherenceResult {
    let panels = ((2.0 * y_hat).ceil() as usize).max(2);
    let fine = stationary_integral(y_hat, panels);
    let coarse = stationary_integral(y_hat, panels / 2);
    let scale = 2.0 / PI * alpha * v * v;
    DecoherenceResult {
        s_value: scale * fine,
        method: SMethod::Stationary,
        error_estimate: scale * (fine - coarse).abs(),
        regime_label: RegimeLabel::LargeTSmallY,
        clamped: false,
    }
}

fn stationary_integral(y_hat: f64, panels: usize) -> f64 {
    let (x, w) = gauss_legendre(16);
    let h = 1.0 / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        let mut part = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            let mu = mid + 0.5 * h * xi;
            part += wi * (1.0 - mu * mu) * time_profile(mu * y_hat);
        }
        sum += 0.5 * h * part;
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub charge_number: i32,
    /// Velocity in units of c.
    pub velocity: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub particles: Vec<Particle>,
}

impl EnsembleSpec {
    pub fn new(particles: Vec<Particle>) -> Result<Self> {
        let e = EnsembleSpec { particles };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.particles.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        for p in &self.particles {
            check_speed(p.velocity.norm())?;
        }
        Ok(())
    }

    /// N particles with charges ±1 and isotropic velocities, |v| uniform in [0, v_max).
    pub fn random(n: usize, v_max: f64, seed: u64) -> Result<Self> {
        check_speed(v_max)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let particles = (0..n)
            .map(|_| {
                let z = if rng.random::<bool>() { 1 } else { -1 };
                let mu: f64 = 2.0 * rng.random::<f64>() - 1.0;
                let phi = 2.0 * PI * rng.random::<f64>();
                let s = (1.0 - mu * mu).max(0.0).sqrt();
                let speed = v_max * rng.random::<f64>();
                Particle {
                    charge_number: z,
                    velocity: Vec3::new(s * phi.cos(), s * phi.sin(), mu) * speed,
                }
            })
            .collect();
        Self::new(particles)
    }

    /// Q = |Σ z_j v_j|² = Σ_jk z_j z_k v_j·v_k.
    pub fn pairing_sum(&self) -> f64 {
        let total = self
            .particles
            .iter()
            .fold(Vec3::ZERO, |acc, p| acc + p.velocity * f64::from(p.charge_number));
        total.dot(total)
    }
}

/// N-particle exponent (4/3π)·L(τ̂)·α·Q in the large-separation, coincident-kernel
/// approximation; `alpha_unit` is the coupling of a unit charge.
pub fn n_particle_exponent(ensemble: &EnsembleSpec, tau_hat: f64, alpha_unit: f64) -> Result<f64> {
    ensemble.validate()?;
    if !(tau_hat >= 0.0 && alpha_unit >= 0.0) {
        return Err(Error::InvalidArgument("tau_hat and alpha must be non-negative".into()));
    }
    Ok(LARGE_Y_PREFACTOR * time_profile(tau_hat) * alpha_unit * ensemble.pairing_sum())
}
