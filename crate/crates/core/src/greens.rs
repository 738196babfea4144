//! The transverse thermal photon kernel in reduced units.
//!
//! Normalization: every kernel here is dimensionless. For unit vectors a, b
//!
//! ```text
//! a·G(r, τ)·b = (2/π) ∫₀^∞ dk k n(k) cos(kτ) [T_δ(k|r|) a·b + T_r(k|r|) (a·r̂)(b·r̂)]
//! ```
//!
//! with n(k) = 1/(eᵏ − 1), r in thermal lengths and τ in thermal times. The
//! physical prefactors (coupling, speeds) are applied by the callers, once.

use crate::error::{Error, Result};
use crate::quadrature::{
    bose_series, planck_adaptive_rel, BoseIntegralSpec, Envelope, QuadratureConfig,
    QuadratureResult, Trig,
};
use crate::quadrature::gauss_legendre;
use crate::special::{coth_minus_inv, j0, j1_over_x};
use std::sync::OnceLock;
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default absolute and relative tolerance for kernel evaluations.
pub const KERNEL_TOL: f64 = 1e-12;

/// Angular average of the transverse projector against cos(k·r).
///
/// Returns (T_δ, T_r) at u = k|r|: T_δ = j₀ − j₁/u, T_r = −j₀ + 3j₁/u.
/// Below u = 1 both use their own power series, which avoids the
/// cancellation in T_r ~ u²/15.
pub fn transverse_weights(u: f64) -> (f64, f64) {
    let u = u.abs();
    if u < 1.0 {
        // Σ (−1)ⁿ u²ⁿ/(2n+1)! · (2n+2)/(2n+3)  and  · (−2n)/(2n+3)
        let u2 = u * u;
        let mut base = 1.0;
        let mut td = 2.0 / 3.0;
        let mut tr = 0.0;
        for n in 1..20 {
            let nf = n as f64;
            base *= -u2 / ((2.0 * nf) * (2.0 * nf + 1.0));
            let d = base * (2.0 * nf + 2.0) / (2.0 * nf + 3.0);
            let r = base * (-2.0 * nf) / (2.0 * nf + 3.0);
            td += d;
            tr += r;
            if d.abs() < 1e-18 * td.abs() && r.abs() < 1e-18 * tr.abs() {
                break;
            }
        }
        (td, tr)
    } else {
        let a = j0(u);
        let b = j1_over_x(u);
        (a - b, -a + 3.0 * b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractedKernelArgs {
    pub y_hat: f64,
    pub tau_hat: f64,
    pub cos_pr: f64,
    pub v: f64,
}

impl ContractedKernelArgs {
    pub fn validate(&self) -> Result<()> {
        if !(self.y_hat >= 0.0 && self.y_hat.is_finite()) {
            return Err(Error::InvalidArgument(format!("y_hat must be >= 0, got {}", self.y_hat)));
        }
        if !self.tau_hat.is_finite() {
            return Err(Error::InvalidArgument("tau_hat must be finite".into()));
        }
        if !(-1.0..=1.0).contains(&self.cos_pr) {
            return Err(Error::InvalidArgument(format!(
                "cos_pr must lie in [-1, 1], got {}",
                self.cos_pr
            )));
        }
        Ok(())
    }
}

/// One spatial argument of a kernel combination:
/// weight · [delta_coef·T_δ(k·r) + r_coef·T_r(k·r)].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTerm {
    pub weight: f64,
    pub r: f64,
    pub delta_coef: f64,
    pub r_coef: f64,
}

impl KernelTerm {
    /// Term for a·G(r)·b.
    pub fn bilinear(weight: f64, a: Vec3, b: Vec3, r: Vec3) -> Self {
        let rn = r.norm();
        let rhat = r.unit_or_zero();
        KernelTerm {
            weight,
            r: rn,
            delta_coef: a.dot(b),
            // at r = 0 the T_r weight vanishes, so the direction is irrelevant
            r_coef: a.dot(rhat) * b.dot(rhat),
        }
    }

    fn at(&self, k: f64) -> f64 {
        let (td, tr) = transverse_weights(k * self.r);
        self.weight * (self.delta_coef * td + self.r_coef * tr)
    }
}

/// (2/π)∫ dk k n(k) cos(kτ) Σ terms, by adaptive quadrature.
///
/// All terms share one integrand, so identical terms with opposite weights
/// cancel point by point before any quadrature error enters.
pub fn kernel_combination(terms: &[KernelTerm], tau_hat: f64, tol: f64) -> Result<QuadratureResult> {
    let amplitude: f64 = terms
        .iter()
        .map(|t| t.weight.abs() * (t.delta_coef.abs() + 2.0 * t.r_coef.abs()))
        .sum();
    let scale = 2.0 / PI;
    if amplitude == 0.0 {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            terms_or_panels: 0,
            method: crate::quadrature::QuadratureMethod::Adaptive,
        });
    }
    let r_max = terms.iter().map(|t| t.r).fold(0.0, f64::max);
    let tau = tau_hat.abs();
    let integrand = |k: f64| {
        let mut s = 0.0;
        for t in terms {
            s += t.at(k);
        }
        crate::special::x_over_expm1(k) * (k * tau).cos() * s
    };
    let env = Envelope {
        power: 1,
        amplitude,
    };
    let mut r = planck_adaptive_rel(
        integrand,
        env,
        tau + r_max,
        tol / scale,
        tol,
        &QuadratureConfig::default(),
    )?;
    r.value *= scale;
    r.abs_error_estimate *= scale;
    Ok(r)
}

/// a·G(r, τ)·b for arbitrary vectors a, b.
pub fn bilinear_kernel(a: Vec3, b: Vec3, r: Vec3, tau_hat: f64, tol: f64) -> Result<f64> {
    Ok(kernel_combination(&[KernelTerm::bilinear(1.0, a, b, r)], tau_hat, tol)?.value)
}

/// K(ŷ, τ̂, cos_pr) = p̂·G·p̂ with the default tolerance.
pub fn contracted_kernel(args: &ContractedKernelArgs) -> Result<f64> {
    Ok(contracted_kernel_with(args, KERNEL_TOL)?.value)
}

pub fn contracted_kernel_with(args: &ContractedKernelArgs, tol: f64) -> Result<QuadratureResult> {
    args.validate()?;
    let term = KernelTerm {
        weight: 1.0,
        r: args.y_hat,
        delta_coef: 1.0,
        r_coef: args.cos_pr * args.cos_pr,
    };
    kernel_combination(&[term], args.tau_hat, tol)
}

/// Kernel at zero separation: (4/3π)∫k n(k) cos(kτ̂) dk, even in τ̂.
pub fn coincidence_limit(tau_hat: f64) -> f64 {
    let spec = BoseIntegralSpec {
        power: 1,
        trig: Trig::Cos,
        frequency: tau_hat.abs(),
    };
    let r = bose_series(&spec, 1e-14).expect("the m = 1 cosine series converges for every finite frequency");
    4.0 / (3.0 * PI) * r.value
}

/// g(a) = Σₙ a/(n² + a²) = (π/2)coth(πa) − 1/(2a), odd in a.
fn planck_sine(a: f64) -> f64 {
    0.5 * PI * coth_minus_inv(PI * a)
}

/// Kernel weights from the resummed Planck series.
///
/// Returns (2/π)∫dk k n(k) cos(kτ) T(k r) for T = T_δ and T = T_r, using
/// ∫k n cos(kτ) j₀(kr) = [g(τ+r) − g(τ−r)]/(2r) and
/// ∫k n cos(kτ) j₁(kr)/(kr) = (1/2r)∫₀¹ μ[g(τ+rμ) − g(τ−rμ)]dμ.
/// Much cheaper than the adaptive k-integral when r is moderate.
pub fn resummed_weights(r: f64, tau_hat: f64) -> (f64, f64) {
    let r = r.abs();
    let u = tau_hat.abs();
    let (i0, i1) = if r < 1e-3 {
        // Taylor in r around the coincidence values g′(u)·(1, 1/3)
        let d1 = bose_value(1, u);
        let d3 = -bose_value(3, u);
        (d1 + r * r * d3 / 6.0, d1 / 3.0 + r * r * d3 / 30.0)
    } else {
        let i0 = (planck_sine(u + r) - planck_sine(u - r)) / (2.0 * r);
        let (x, w) = gl16();
        let panels = (2.0 * r).ceil().max(1.0) as usize;
        let h = 1.0 / panels as f64;
        let mut acc = 0.0;
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(w.iter()) {
                let mu = mid + 0.5 * h * xi;
                acc += 0.5 * h * wi * mu * (planck_sine(u + r * mu) - planck_sine(u - r * mu));
            }
        }
        (i0, acc / (2.0 * r))
    };
    let s = 2.0 / PI;
    (s * (i0 - i1), s * (3.0 * i1 - i0))
}

fn bose_value(power: i32, u: f64) -> f64 {
    let spec = BoseIntegralSpec {
        power,
        trig: Trig::Cos,
        frequency: u,
    };
    bose_series(&spec, 1e-14).expect("cosine series converges").value
}

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(16))
}

/// a·G(r, τ)·b from [`resummed_weights`].
pub fn bilinear_resummed(a: Vec3, b: Vec3, r: Vec3, tau_hat: f64) -> f64 {
    let (wd, wr) = resummed_weights(r.norm(), tau_hat);
    let rhat = r.unit_or_zero();
    wd * a.dot(b) + wr * a.dot(rhat) * b.dot(rhat)
}
