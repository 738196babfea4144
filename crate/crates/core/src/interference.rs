//! Two-packet interference: the cross-term decay exponent S₁₂ and the screen
//! pattern it damps.
//!
//! Both packets leave the same point at τ̂ = 0 with velocities v₁, v₂ (units
//! of c) and move on straight lines. Envelopes are rigid Gaussians
//! φ(x) = exp(−x²/(4σ²)) translated by τ̂·(vᵢ·axis); spreading is ignored.
//! The fringe phase is κ[−(v₂ − v₁)·x + τ̂(|v₂|² − |v₁|²)/2] where
//! κ = mc²/(k_B T) is `phase_scale`, the ratio that turns reduced momenta and
//! thermal lengths into radians.

use crate::constants::INTERFERENCE_PREFACTOR;
use crate::error::{Error, Result};
use crate::greens::bilinear_resummed;
use crate::quadrature::{integrate, uniform_breakpoints, AdaptiveOptions};
use crate::special::time_profile;
use crate::units::check_speed;
use crate::vec3::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

/// Default tolerance on S₁₂/(α·Δv²).
pub const S12_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoPacketConfig {
    pub v1: Vec3,
    pub v2: Vec3,
    /// Envelope width σ in thermal lengths.
    pub packet_width: f64,
    pub screen_axis: Vec3,
    /// Screen positions in thermal lengths, strictly increasing.
    pub screen_grid: Vec<f64>,
    pub alpha_eff: f64,
    pub tau_hat: f64,
    /// κ = mc²/(k_B T).
    pub phase_scale: f64,
    #[serde(default = "unit_amplitudes")]
    pub amplitudes: [f64; 2],
}

fn unit_amplitudes() -> [f64; 2] {
    [1.0, 1.0]
}

impl TwoPacketConfig {
    pub fn validate(&self) -> Result<()> {
        check_speed(self.v1.norm())?;
        check_speed(self.v2.norm())?;
        if !(self.packet_width > 0.0 && self.packet_width.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "packet_width must be positive, got {}",
                self.packet_width
            )));
        }
        if (self.screen_axis.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument("screen_axis must be a unit vector".into()));
        }
        if self.screen_grid.len() < 2 || self.screen_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("screen grid must have at least two strictly increasing points".into()));
        }
        if !(self.alpha_eff >= 0.0 && self.tau_hat >= 0.0 && self.phase_scale >= 0.0) {
            return Err(Error::InvalidArgument("alpha_eff, tau_hat and phase_scale must be non-negative".into()));
        }
        if self.amplitudes.iter().any(|a| !(a.is_finite() && *a >= 0.0)) {
            return Err(Error::InvalidArgument("amplitudes must be non-negative".into()));
        }
        Ok(())
    }

    /// Envelope centers on the screen axis.
    pub fn centers(&self) -> (f64, f64) {
        (
            self.tau_hat * self.v1.dot(self.screen_axis),
            self.tau_hat * self.v2.dot(self.screen_axis),
        )
    }

    /// Normalized envelope overlap ∫φ₁φ₂ / √(∫φ₁²∫φ₂²) = exp(−d²/(8σ²)).
    pub fn overlap(&self) -> f64 {
        let (c1, c2) = self.centers();
        let d = c1 - c2;
        (-d * d / (8.0 * self.packet_width * self.packet_width)).exp()
    }

    /// Fringe wavenumber κ·|(v₂ − v₁)·axis| along the screen.
    pub fn fringe_wavenumber(&self) -> f64 {
        self.phase_scale * (self.v2 - self.v1).dot(self.screen_axis).abs()
    }

    fn phase(&self, x: f64) -> f64 {
        let dv = self.v2 - self.v1;
        let kinetic = 0.5 * self.tau_hat * (self.v2.dot(self.v2) - self.v1.dot(self.v1));
        self.phase_scale * (-dv.dot(self.screen_axis) * x + kinetic)
    }
}

/// (2/3π)·α·Δv²·L(τ̂), the cross-term exponent with drift arguments dropped.
pub fn s12_closed(tau_hat: f64, dv: f64, alpha: f64) -> f64 {
    INTERFERENCE_PREFACTOR * alpha * dv * dv * time_profile(tau_hat)
}

/// Cross-term exponent from the four double-time kernel integrals.
///
/// S₁₂ = (α/2)∫₀^τ̂∫₀^τ̂ ds dτ [v₁Gv₁ + v₂Gv₂ − v₁Gv₂ − v₂Gv₁], each kernel
/// evaluated at the actual separation of the two world points. Folding the
/// square onto s > τ with u = s − τ leaves a triangle integral whose
/// diagonal part is one-dimensional.
pub fn s12_first_principles(cfg: &TwoPacketConfig, tol: f64) -> Result<f64> {
    cfg.validate()?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let (v1, v2, t) = (cfg.v1, cfg.v2, cfg.tau_hat);
    let dv = v1 - v2;
    let scale = dv.dot(dv);
    if cfg.alpha_eff == 0.0 || t == 0.0 || scale == 0.0 {
        return Ok(0.0);
    }
    let abs_tol = tol * scale;
    let opts = |abs: f64| AdaptiveOptions {
        abs_tol: abs,
        rel_tol: 1e-11,
        max_panels: 20_000,
    };

    // inner integrand over τ ∈ [0, T − u] at fixed lag u
    let bracket = |u: f64, tau: f64| {
        let same = bilinear_resummed(v1, v1, v1 * u, u) + bilinear_resummed(v2, v2, v2 * u, u);
        let cross = bilinear_resummed(v1, v2, v1 * u + dv * tau, u) + bilinear_resummed(v2, v1, v2 * u - dv * tau, u);
        same - cross
    };
    let mut failure: Option<Error> = None;
    let outer = |u: f64| {
        let span = t - u;
        if span <= 0.0 || failure.is_some() {
            return 0.0;
        }
        let breaks = uniform_breakpoints(0.0, span, 1.0);
        match integrate(|tau| bracket(u, tau), &breaks, opts(0.25 * abs_tol / t.max(1.0)), "s12_inner") {
            Ok(r) => r.value,
            Err(e) => {
                failure = Some(e);
                0.0
            }
        }
    };
    let breaks = uniform_breakpoints(0.0, t, 1.0);
    let r = integrate(outer, &breaks, opts(0.5 * abs_tol), "s12_first_principles");
    if let Some(e) = failure {
        return Err(e);
    }
    // (α/2)·2 from folding the square
    Ok(cfg.alpha_eff * r?.value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VisibilityUndefined {
    SinglePacket,
    NonOverlapping,
    NoFringes,
    WindowOutsideGrid,
}

impl fmt::Display for VisibilityUndefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            VisibilityUndefined::SinglePacket => "only one packet has nonzero amplitude",
            VisibilityUndefined::NonOverlapping => "envelopes do not overlap",
            VisibilityUndefined::NoFringes => "velocity difference has no component along the screen",
            VisibilityUndefined::WindowOutsideGrid => "fringe window is not resolved by the screen grid",
        };
        f.write_str(s)
    }
}

/// Envelope overlap below which the fringe contrast is not reported.
pub const MIN_OVERLAP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenPattern {
    pub positions: Vec<f64>,
    pub density: Vec<f64>,
    pub rho1: Vec<f64>,
    pub rho2: Vec<f64>,
    pub cross: Vec<f64>,
    pub s12: f64,
    /// exp(−S₁₂).
    pub visibility: f64,
    pub overlap: f64,
    /// Midpoint between the two envelope centers.
    pub center: f64,
    /// Fringe period, infinite when there are no fringes.
    pub fringe_period: f64,
    pub single_packet: bool,
}

impl ScreenPattern {
    /// (max − min)/(max + min) over one fringe period either side of the
    /// midpoint, with parabolic refinement of the extrema.
    pub fn fringe_visibility(&self) -> std::result::Result<f64, VisibilityUndefined> {
        if self.single_packet {
            return Err(VisibilityUndefined::SinglePacket);
        }
        if self.overlap < MIN_OVERLAP {
            return Err(VisibilityUndefined::NonOverlapping);
        }
        if !self.fringe_period.is_finite() {
            return Err(VisibilityUndefined::NoFringes);
        }
        let (lo, hi) = (self.center - self.fringe_period, self.center + self.fringe_period);
        let x = &self.positions;
        if lo < x[0] || hi > x[x.len() - 1] {
            return Err(VisibilityUndefined::WindowOutsideGrid);
        }
        let idx: Vec<usize> = (1..x.len() - 1).filter(|&i| x[i] >= lo && x[i] <= hi).collect();
        // need several samples per fringe to refine extrema
        if idx.len() < 16 {
            return Err(VisibilityUndefined::WindowOutsideGrid);
        }
        let d = &self.density;
        let mut best_max = f64::NEG_INFINITY;
        let mut best_min = f64::INFINITY;
        for &i in &idx {
            if d[i] >= d[i - 1] && d[i] >= d[i + 1] {
                best_max = best_max.max(parabolic_extremum(x, d, i));
            }
            if d[i] <= d[i - 1] && d[i] <= d[i + 1] {
                best_min = best_min.min(parabolic_extremum(x, d, i));
            }
        }
        if !best_max.is_finite() || !best_min.is_finite() {
            return Err(VisibilityUndefined::WindowOutsideGrid);
        }
        Ok(((best_max - best_min) / (best_max + best_min)).clamp(0.0, 1.0))
    }

    pub fn peak_density(&self) -> f64 {
        self.density.iter().cloned().fold(0.0, f64::max)
    }
}

/// Value of the parabola through points i−1, i, i+1 at its vertex.
fn parabolic_extremum(x: &[f64], y: &[f64], i: usize) -> f64 {
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let denom = (x0 - x1) * (x0 - x2) * (x1 - x2);
    if denom == 0.0 {
        return y1;
    }
    let a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom;
    let b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / denom;
    if a == 0.0 {
        return y1;
    }
    let xv = -b / (2.0 * a);
    if xv < x0 || xv > x2 {
        return y1;
    }
    let c = y0 - a * x0 * x0 - b * x0;
    a * xv * xv + b * xv + c
}

/// Screen pattern with S₁₂ from [`s12_first_principles`].
pub fn screen_pattern(cfg: &TwoPacketConfig, tol: f64) -> Result<ScreenPattern> {
    let s12 = s12_first_principles(cfg, tol)?;
    screen_pattern_with_exponent(cfg, s12)
}

/// Screen pattern for a prescribed cross-term exponent.
pub fn screen_pattern_with_exponent(cfg: &TwoPacketConfig, s12: f64) -> Result<ScreenPattern> {
    cfg.validate()?;
    if !(s12 >= 0.0) {
        return Err(Error::InvalidArgument(format!("S12 must be non-negative, got {s12}")));
    }
    let (c1, c2) = cfg.centers();
    let sigma = cfg.packet_width;
    let damp = (-s12).exp();
    let [a1, a2] = cfg.amplitudes;
    let n = cfg.screen_grid.len();
    let mut pat = ScreenPattern {
        positions: cfg.screen_grid.clone(),
        density: Vec::with_capacity(n),
        rho1: Vec::with_capacity(n),
        rho2: Vec::with_capacity(n),
        cross: Vec::with_capacity(n),
        s12,
        visibility: damp,
        overlap: cfg.overlap(),
        center: 0.5 * (c1 + c2),
        fringe_period: 2.0 * PI / cfg.fringe_wavenumber(),
        single_packet: a1 == 0.0 || a2 == 0.0,
    };
    let envelope = |x: f64, c: f64| (-(x - c) * (x - c) / (4.0 * sigma * sigma)).exp();
    for &x in &cfg.screen_grid {
        let p1 = a1 * envelope(x, c1);
        let p2 = a2 * envelope(x, c2);
        let cross = 2.0 * (p1 * p2) * cfg.phase(x).cos() * damp;
        let (r1, r2) = (p1 * p1, p2 * p2);
        let mut d = r1 + r2 + cross;
        if d < 0.0 {
            if d < -1e-12 {
                return Err(Error::InvalidArgument(format!("negative density {d:e} at x = {x}")));
            }
            d = 0.0;
        }
        pat.rho1.push(r1);
        pat.rho2.push(r2);
        pat.cross.push(cross);
        pat.density.push(d);
    }
    Ok(pat)
}
