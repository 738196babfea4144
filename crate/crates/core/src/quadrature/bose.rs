//! Integrals ∫₀^∞ kᵐ · trig(a·k) · (eᵏ − 1)⁻¹ dk.
//!
//! Two independent routes are provided. [`bose_series`] expands the Planck
//! weight as Σₙ e^{−nk}, evaluates every term as a closed-form Laplace
//! integral, and replaces the tail beyond a cut N by its Euler–Maclaurin
//! expansion. [`bose_adaptive`] integrates the integrand directly with
//! adaptive Gauss–Kronrod panels up to a cutoff whose exponential tail is
//! bounded analytically.

use super::adaptive::{integrate, uniform_breakpoints, AdaptiveOptions};
use crate::error::{Error, Result};
use crate::special::{one_minus_cos_over_sq, sinc, x_over_expm1, SMALL_ARG};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trig {
    Cos,
    Sin,
    OneMinusCos,
    Constant,
}

impl Trig {
    pub fn name(self) -> &'static str {
        match self {
            Trig::Cos => "cos",
            Trig::Sin => "sin",
            Trig::OneMinusCos => "one_minus_cos",
            Trig::Constant => "constant",
        }
    }
}

impl fmt::Display for Trig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One integral of the catalog: power m ∈ {−1, 0, 1, 2, 3}, a trig factor and a ≥ 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoseIntegralSpec {
    pub power: i32,
    pub trig: Trig,
    pub frequency: f64,
}

impl BoseIntegralSpec {
    pub fn new(power: i32, trig: Trig, frequency: f64) -> Result<Self> {
        let spec = BoseIntegralSpec {
            power,
            trig,
            frequency,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(-1..=3).contains(&self.power) {
            return Err(Error::InvalidArgument(format!(
                "power {} outside the catalog range -1..=3",
                self.power
            )));
        }
        if !(self.frequency.is_finite() && self.frequency >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "frequency must be finite and non-negative, got {}",
                self.frequency
            )));
        }
        // near k = 0 the weight behaves like k^(m-1) times the trig factor
        let integrable = match (self.power, self.trig) {
            (-1, Trig::OneMinusCos) => true,
            (-1, _) => false,
            (0, Trig::Sin | Trig::OneMinusCos) => true,
            (0, _) => false,
            _ => true,
        };
        if integrable {
            Ok(())
        } else {
            Err(Error::NonIntegrable {
                power: self.power,
                trig: self.trig.name(),
            })
        }
    }

    /// Integrand value at k, stable at k → 0.
    pub fn integrand(&self, k: f64) -> f64 {
        let a = self.frequency;
        let w = x_over_expm1(k);
        match self.power {
            -1 => w * a * a * one_minus_cos_over_sq(a * k),
            0 => match self.trig {
                Trig::Sin => w * a * sinc(a * k),
                _ => w * a * a * k * one_minus_cos_over_sq(a * k),
            },
            m => {
                let trig = match self.trig {
                    Trig::Cos => (a * k).cos(),
                    Trig::Sin => (a * k).sin(),
                    Trig::OneMinusCos => {
                        let s = (0.5 * a * k).sin();
                        2.0 * s * s
                    }
                    Trig::Constant => 1.0,
                };
                w * k.powi(m - 1) * trig
            }
        }
    }

    fn vanishes_identically(&self) -> bool {
        self.frequency == 0.0 && matches!(self.trig, Trig::Sin | Trig::OneMinusCos)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadratureMethod {
    Series,
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub terms_or_panels: usize,
    pub method: QuadratureMethod,
}

/// Iteration caps and thresholds shared by both engines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Largest series cut N before giving up.
    pub series_max_terms: usize,
    /// Largest number of adaptive panels.
    pub panel_budget: usize,
    /// Below this k the Planck factor uses its Taylor series.
    pub small_k: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            series_max_terms: 1_000_000,
            panel_budget: 100_000,
            small_k: SMALL_ARG,
        }
    }
}

impl QuadratureConfig {
    /// Highest angular frequency the adaptive engine accepts over [0, k_max].
    ///
    /// Initial panels are one period wide and may use at most half the budget.
    pub fn frequency_cap(&self, k_max: f64) -> f64 {
        2.0 * PI * (self.panel_budget as f64 / 2.0) / k_max
    }
}

// ---------------------------------------------------------------------------
// Series route
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy)]
enum Family {
    /// (n − c)^(−q)
    Power(u32),
    /// ln(n − c)
    Log,
}

/// f(n) = Re[coef · g(n − shift)].
#[derive(Debug, Clone, Copy)]
struct Primitive {
    family: Family,
    coef: Complex64,
    shift: Complex64,
}

const BERNOULLI: [f64; 9] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
];

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

impl Primitive {
    /// k-th derivative of g at z.
    fn derivative(&self, z: Complex64, k: u32) -> Complex64 {
        match self.family {
            Family::Power(q) => {
                // (−1)^k q(q+1)…(q+k−1) z^(−q−k)
                let rising: f64 = (0..k).map(|j| f64::from(q + j)).product();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                z.powi(-((q + k) as i32)) * (sign * rising)
            }
            Family::Log => {
                if k == 0 {
                    z.ln()
                } else {
                    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                    z.powi(-(k as i32)) * (sign * factorial(k - 1))
                }
            }
        }
    }

    /// ∫_N^∞ g, regularized by dropping the divergent ln X / X ln X pieces,
    /// which cancel in every integrable combination.
    fn tail_integral(&self, z: Complex64) -> Complex64 {
        match self.family {
            Family::Power(1) => -z.ln(),
            Family::Power(q) => z.powi(1 - q as i32) / f64::from(q - 1),
            Family::Log => -(z * z.ln() - z),
        }
    }
}

fn primitives(spec: &BoseIntegralSpec) -> Vec<Primitive> {
    let a = spec.frequency;
    let shifted = Complex64::new(0.0, a);
    let zero = Complex64::new(0.0, 0.0);
    if spec.power == -1 {
        // ½ ln(1 + a²/n²) = Re[ln(n − ia) − ln n]
        return vec![
            Primitive {
                family: Family::Log,
                coef: Complex64::new(1.0, 0.0),
                shift: shifted,
            },
            Primitive {
                family: Family::Log,
                coef: Complex64::new(-1.0, 0.0),
                shift: zero,
            },
        ];
    }
    let q = (spec.power + 1) as u32;
    let mf = factorial(spec.power as u32);
    let power = Family::Power(q);
    match spec.trig {
        // m!·Re (n − ia)^(−q)
        Trig::Cos => vec![Primitive {
            family: power,
            coef: Complex64::new(mf, 0.0),
            shift: shifted,
        }],
        // m!·Im z = m!·Re(−i z)
        Trig::Sin => vec![Primitive {
            family: power,
            coef: Complex64::new(0.0, -mf),
            shift: shifted,
        }],
        Trig::Constant => vec![Primitive {
            family: power,
            coef: Complex64::new(mf, 0.0),
            shift: zero,
        }],
        Trig::OneMinusCos => vec![
            Primitive {
                family: power,
                coef: Complex64::new(mf, 0.0),
                shift: zero,
            },
            Primitive {
                family: power,
                coef: Complex64::new(-mf, 0.0),
                shift: shifted,
            },
        ],
    }
}

/// Closed-form Laplace integral ∫₀^∞ kᵐ trig(ak) e^{−nk} dk, cancellation-free.
fn laplace_term(spec: &BoseIntegralSpec, n: f64) -> f64 {
    let a = spec.frequency;
    if spec.power == -1 {
        let t = a / n;
        return 0.5 * (t * t).ln_1p();
    }
    let q = spec.power + 1;
    let mf = factorial(spec.power as u32);
    let phi = a.atan2(n);
    let r = n.hypot(a);
    match spec.trig {
        Trig::Cos => mf * (q as f64 * phi).cos() / r.powi(q),
        Trig::Sin => mf * (q as f64 * phi).sin() / r.powi(q),
        Trig::Constant => mf / n.powi(q),
        Trig::OneMinusCos => {
            // 1 − c·d with c = (n/r)^q, d = cos(qφ)
            let t = a / n;
            let c = (-(q as f64) * 0.5 * (t * t).ln_1p()).exp();
            let one_minus_c = -(-(q as f64) * 0.5 * (t * t).ln_1p()).exp_m1();
            let half = (0.5 * q as f64 * phi).sin();
            let one_minus_d = 2.0 * half * half;
            mf / n.powi(q) * (one_minus_c + c * one_minus_d)
        }
    }
}

/// Euler–Maclaurin estimate of Σ_{n≥N} f(n) and the size of the first omitted term.
fn em_tail(prims: &[Primitive], cut: f64) -> (f64, f64) {
    let mut tail = Complex64::new(0.0, 0.0);
    let mut next = 0.0;
    for p in prims {
        let z = Complex64::new(cut, 0.0) - p.shift;
        let mut acc = p.tail_integral(z) + p.derivative(z, 0) * 0.5;
        for (j, b) in BERNOULLI.iter().take(8).enumerate() {
            let order = 2 * (j as u32 + 1);
            acc -= p.derivative(z, order - 1) * (b / factorial(order));
        }
        tail += p.coef * acc;
        let order = 18;
        next += (p.coef * p.derivative(z, order - 1) * (BERNOULLI[8] / factorial(order))).norm();
    }
    (tail.re, next)
}

/// Series evaluation with default caps.
pub fn bose_series(spec: &BoseIntegralSpec, tol: f64) -> Result<QuadratureResult> {
    bose_series_with(spec, tol, &QuadratureConfig::default())
}

pub fn bose_series_with(
    spec: &BoseIntegralSpec,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    spec.validate()?;
    check_tol(tol)?;
    if spec.vanishes_identically() {
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            terms_or_panels: 0,
            method: QuadratureMethod::Series,
        });
    }
    let prims = primitives(spec);
    let mut cut: usize = 20;
    let mut best = f64::INFINITY;
    while cut <= cfg.series_max_terms {
        // direct part summed from the small end up, compensated
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut abs_sum = 0.0;
        for n in (1..cut).rev() {
            let v = laplace_term(spec, n as f64);
            abs_sum += v.abs();
            let y = v - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        let (tail, next) = em_tail(&prims, cut as f64);
        let roundoff = 4.0 * f64::EPSILON * (abs_sum + tail.abs());
        let err = 2.0 * next + roundoff;
        if err <= tol {
            return Ok(QuadratureResult {
                value: sum + tail,
                abs_error_estimate: err,
                terms_or_panels: cut,
                method: QuadratureMethod::Series,
            });
        }
        best = best.min(err);
        cut *= 2;
    }
    Err(Error::BudgetExceeded {
        what: "bose_series",
        tol,
        cap: cfg.series_max_terms,
        achieved: best,
    })
}

// ---------------------------------------------------------------------------
// Adaptive route
// ---------------------------------------------------------------------------

/// Large-k envelope: |integrand(k)| ≤ amplitude · k^power · (eᵏ − 1)⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub power: i32,
    pub amplitude: f64,
}

/// Upper bound on ∫_K^∞ amplitude · k^m e^{−k}/(1 − e^{−K}) dk.
fn tail_bound(env: Envelope, cutoff: f64) -> f64 {
    let base = match env.power {
        m if m >= 0 => {
            // Γ(m+1, K) = e^{−K} Σ_{j≤m} m!/j! K^j
            let m = m as u32;
            let mf = factorial(m);
            let s: f64 = (0..=m).map(|j| mf / factorial(j) * cutoff.powi(j as i32)).sum();
            s * (-cutoff).exp()
        }
        // E₁(K) ≤ e^{−K}/K
        -1 => (-cutoff).exp() / cutoff,
        m => (-cutoff).exp() * cutoff.powi(m),
    };
    env.amplitude * base / (1.0 - (-cutoff).exp())
}

/// Smallest cutoff K ≥ 20 whose tail bound is below `budget`.
pub fn planck_cutoff(env: Envelope, budget: f64) -> f64 {
    let mut k = 20.0;
    while tail_bound(env, k) > budget && k < 700.0 {
        k += 2.0;
    }
    k
}

/// Adaptive integral of a Planck-weighted integrand over [0, ∞).
///
/// `integrand` must already contain the Planck factor and be finite at k = 0;
/// `max_frequency` is the largest angular frequency of its oscillating factors
/// and sets the initial panel width. Errors include the analytic tail bound.
pub fn planck_adaptive<F: FnMut(f64) -> f64>(
    integrand: F,
    envelope: Envelope,
    max_frequency: f64,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    planck_adaptive_rel(integrand, envelope, max_frequency, tol, 0.0, cfg)
}

/// As [`planck_adaptive`], stopping at max(tol, rel_tol·|value|) for the panel sum.
pub fn planck_adaptive_rel<F: FnMut(f64) -> f64>(
    integrand: F,
    envelope: Envelope,
    max_frequency: f64,
    tol: f64,
    rel_tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    check_tol(tol)?;
    let cutoff = planck_cutoff(envelope, 0.25 * tol);
    let tail = tail_bound(envelope, cutoff);
    let cap = cfg.frequency_cap(cutoff);
    if max_frequency > cap {
        return Err(Error::OscillationCap {
            frequency: max_frequency,
            cap,
        });
    }
    let width = if max_frequency > 0.0 {
        (2.0 * PI / max_frequency).min(2.0)
    } else {
        2.0
    };
    let mut breaks = vec![0.0];
    breaks.extend(uniform_breakpoints(cfg.small_k, cutoff, width));
    let opts = AdaptiveOptions {
        abs_tol: (tol - tail).max(0.5 * tol),
        rel_tol,
        max_panels: cfg.panel_budget,
    };
    let r = integrate(integrand, &breaks, opts, "bose_adaptive")?;
    Ok(QuadratureResult {
        value: r.value,
        abs_error_estimate: r.error + tail,
        terms_or_panels: r.panels,
        method: QuadratureMethod::Adaptive,
    })
}

/// Adaptive evaluation with default caps.
pub fn bose_adaptive(spec: &BoseIntegralSpec, tol: f64) -> Result<QuadratureResult> {
    bose_adaptive_with(spec, tol, &QuadratureConfig::default())
}

pub fn bose_adaptive_with(
    spec: &BoseIntegralSpec,
    tol: f64,
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    spec.validate()?;
    if spec.vanishes_identically() {
        check_tol(tol)?;
        return Ok(QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            terms_or_panels: 0,
            method: QuadratureMethod::Adaptive,
        });
    }
    let amplitude = match spec.trig {
        Trig::OneMinusCos => 2.0,
        _ => 1.0,
    };
    let env = Envelope {
        power: spec.power,
        amplitude,
    };
    let s = *spec;
    planck_adaptive(move |k| s.integrand(k), env, spec.frequency, tol, cfg)
}

/// ∫₀^∞ sin(ak)(eᵏ − 1)⁻¹ dk = (π/2)·coth(πa) − 1/(2a), with the limit 0 at a → 0.
pub fn coth_sin_identity(a: f64) -> Result<f64> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "coth identity needs a ≥ 0, got {a}"
        )));
    }
    Ok(0.5 * PI * crate::special::coth_minus_inv(PI * a))
}

fn check_tol(tol: f64) -> Result<()> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: i32, t: Trig, a: f64) -> BoseIntegralSpec {
        BoseIntegralSpec::new(m, t, a).unwrap()
    }

    #[test]
    fn zeta_values_from_series() {
        let z2 = bose_series(&spec(1, Trig::Constant, 0.0), 1e-13).unwrap();
        assert!((z2.value - PI * PI / 6.0).abs() < 1e-13, "{}", z2.value);
        let z4 = bose_series(&spec(3, Trig::Constant, 0.0), 1e-13).unwrap();
        assert!((z4.value - PI.powi(4) / 15.0).abs() < 1e-12, "{}", z4.value);
    }

    #[test]
    fn sine_at_one_matches_coth_form() {
        let r = bose_series(&spec(0, Trig::Sin, 1.0), 1e-13).unwrap();
        let direct: f64 = 0.5 * PI / (PI).tanh() - 0.5;
        assert!((r.value - direct).abs() < 1e-12);
        assert!((r.value - 1.076_674_05).abs() < 1e-7);
    }

    #[test]
    fn zero_frequency_cases_are_exactly_zero() {
        for (m, t) in [(0, Trig::Sin), (0, Trig::OneMinusCos), (-1, Trig::OneMinusCos), (2, Trig::Sin)] {
            let s = spec(m, t, 0.0);
            assert_eq!(bose_series(&s, 1e-12).unwrap().value, 0.0);
            assert_eq!(bose_adaptive(&s, 1e-12).unwrap().value, 0.0);
        }
    }

    #[test]
    fn invalid_combinations_rejected() {
        assert!(matches!(
            BoseIntegralSpec::new(-1, Trig::Cos, 1.0),
            Err(Error::NonIntegrable { .. })
        ));
        assert!(matches!(
            BoseIntegralSpec::new(0, Trig::Constant, 1.0),
            Err(Error::NonIntegrable { .. })
        ));
        assert!(BoseIntegralSpec::new(4, Trig::Sin, 1.0).is_err());
        assert!(BoseIntegralSpec::new(1, Trig::Sin, -1.0).is_err());
        assert!(bose_series(&spec(1, Trig::Cos, 1.0), 0.0).is_err());
    }

    #[test]
    fn log_form_closed_sum() {
        // Σ ½ ln(1 + a²/n²) = ½ ln(sinh(πa)/(πa))
        for &a in &[0.1, 1.0, 7.5] {
            let r = bose_series(&spec(-1, Trig::OneMinusCos, a), 1e-13).unwrap();
            let expect = 0.5 * crate::special::time_profile(a);
            assert!((r.value - expect).abs() < 1e-12, "a={a}");
        }
    }

    #[test]
    fn series_and_adaptive_agree_on_catalog() {
        let trigs = [Trig::Cos, Trig::Sin, Trig::OneMinusCos, Trig::Constant];
        for m in -1..=3 {
            for &t in &trigs {
                for &a in &[0.0, 0.3, 2.0, 17.0] {
                    let Ok(s) = BoseIntegralSpec::new(m, t, a) else { continue };
                    let tol = 1e-11;
                    let x = bose_series(&s, tol).unwrap();
                    let y = bose_adaptive(&s, tol).unwrap();
                    assert!(
                        (x.value - y.value).abs() <= 2.0 * tol,
                        "m={m} {t} a={a}: {} vs {}",
                        x.value,
                        y.value
                    );
                }
            }
        }
    }

    #[test]
    fn adaptive_high_frequency_identity() {
        let r = bose_adaptive(&spec(0, Trig::Sin, 10.0), 1e-11).unwrap();
        let expect = 0.5 * PI / (10.0 * PI).tanh() - 0.05;
        assert!((r.value - expect).abs() < 1e-10);
        assert!((r.value - 1.520_796_3).abs() < 1e-7);
    }

    #[test]
    fn oscillation_cap_is_reported() {
        let cfg = QuadratureConfig {
            panel_budget: 50,
            ..QuadratureConfig::default()
        };
        let err = bose_adaptive_with(&spec(1, Trig::Cos, 500.0), 1e-10, &cfg).unwrap_err();
        assert!(matches!(err, Error::OscillationCap { .. }));
    }

    #[test]
    fn series_cap_is_reported() {
        let cfg = QuadratureConfig {
            series_max_terms: 10,
            ..QuadratureConfig::default()
        };
        let err = bose_series_with(&spec(1, Trig::Cos, 1.0), 1e-10, &cfg).unwrap_err();
        assert!(err.is_numeric_budget());
    }

    #[test]
    fn coth_identity_values() {
        assert!((coth_sin_identity(1.0).unwrap() - 1.076_674_05).abs() < 1e-7);
        assert!((coth_sin_identity(10.0).unwrap() - 1.520_796_3).abs() < 1e-7);
        assert_eq!(coth_sin_identity(0.0).unwrap(), 0.0);
        assert!(coth_sin_identity(-0.1).is_err());
        // slope at the origin is π²/6
        let h = 1e-6;
        let slope = coth_sin_identity(h).unwrap() / h;
        assert!((slope - PI * PI / 6.0).abs() < 1e-9);
    }
}
