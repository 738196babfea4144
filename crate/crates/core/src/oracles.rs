//! Brute-force evaluators that share no integrand code with the engines they
//! check. They are slow by design and live in the library so the `validate`
//! command can run them anywhere.

use crate::decoherence::s_exact;
use crate::error::{Error, Result};
use crate::greens::{contracted_kernel_with, ContractedKernelArgs};
use crate::quadrature::{bose_series, BoseIntegralSpec, Trig};
use crate::units::DimensionlessPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Outcome of one oracle comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub quantity: String,
    pub oracle_value: f64,
    pub engine_value: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    /// Statistical or discretization uncertainty of the oracle.
    pub error_bar: f64,
    /// Largest |oracle − engine| accepted.
    pub allowed: f64,
    /// How `allowed` was formed, e.g. "3 sigma".
    pub tolerance: String,
    pub pass: bool,
}

impl OracleReport {
    pub fn new(
        quantity: impl Into<String>,
        oracle_value: f64,
        engine_value: f64,
        error_bar: f64,
        allowed: f64,
        tolerance: impl Into<String>,
    ) -> Self {
        let abs_diff = (oracle_value - engine_value).abs();
        let denom = oracle_value.abs().max(engine_value.abs());
        let rel_diff = if denom > 0.0 { abs_diff / denom } else { 0.0 };
        OracleReport {
            quantity: quantity.into(),
            oracle_value,
            engine_value,
            abs_diff,
            rel_diff,
            error_bar,
            allowed,
            tolerance: tolerance.into(),
            pass: abs_diff <= allowed,
        }
    }
}

/// Samples per deterministic Monte Carlo chunk.
pub const MC_CHUNK: usize = 65_536;

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

/// Monte Carlo estimate of the contracted kernel over three-dimensional k-space.
///
/// Samples |k| from k(eᵏ − 1)⁻¹ by drawing a Planck-series index n ∝ 1/n²
/// and then k ~ Gamma(2, n); the direction is isotropic. Chunk c of the
/// sample stream uses ChaCha8 stream c of `seed`, and chunk results are
/// merged in index order, so the estimate does not depend on the number of
/// worker threads.
pub fn mc_kernel_oracle(args: &ContractedKernelArgs, samples: usize, seed: u64) -> Result<OracleReport> {
    args.validate()?;
    if samples < 10_000 {
        return Err(Error::InvalidArgument(format!("need at least 10^4 samples, got {samples}")));
    }
    let c = args.cos_pr;
    let s = (1.0 - c * c).max(0.0).sqrt();
    let r = [args.y_hat * s, 0.0, args.y_hat * c];
    let tau = args.tau_hat;
    let zeta2 = PI * PI / 6.0;
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut m = Moments::default();
            for _ in 0..count {
                let n = sample_index(&mut rng);
                let u1 = 1.0 - rng.random::<f64>();
                let u2 = 1.0 - rng.random::<f64>();
                let k = -(u1 * u2).ln() / n;
                let mu = 2.0 * rng.random::<f64>() - 1.0;
                let phi = 2.0 * PI * rng.random::<f64>();
                let st = (1.0 - mu * mu).max(0.0).sqrt();
                let dir = [st * phi.cos(), st * phi.sin(), mu];
                let kr = k * (dir[0] * r[0] + dir[1] * r[1] + dir[2] * r[2]);
                // momentum along z: transverse weight 1 − (k̂·ẑ)²
                let x = 2.0 / PI * zeta2 * (1.0 - mu * mu) * kr.cos() * (k * tau).cos();
                m.n += 1;
                m.sum += x;
                m.sum_sq += x * x;
            }
            m
        })
        .collect();
    let total = parts.iter().fold(Moments::default(), |a, b| Moments {
        n: a.n + b.n,
        sum: a.sum + b.sum,
        sum_sq: a.sum_sq + b.sum_sq,
    });
    let nf = total.n as f64;
    let mean = total.sum / nf;
    let var = (total.sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    let stderr = (var / nf).sqrt();
    let engine = contracted_kernel_with(args, 1e-12)?;
    Ok(OracleReport::new(
        format!(
            "kernel MC (y_hat={}, tau_hat={}, cos_pr={}, samples={samples}, seed={seed})",
            args.y_hat, args.tau_hat, args.cos_pr
        ),
        mean,
        engine.value,
        stderr,
        3.0 * stderr + engine.abs_error_estimate,
        "3 sigma",
    ))
}

/// Index n ≥ 1 with probability ∝ 1/n², by rejection from a Pareto proposal.
fn sample_index<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let u = 1.0 - rng.random::<f64>();
        let n = (1.0 / u).floor();
        if !n.is_finite() {
            continue;
        }
        // proposal mass 1/(n(n+1)), target 1/n², ratio bounded by 2
        if rng.random::<f64>() * 2.0 * n < n + 1.0 {
            return n;
        }
    }
}

/// Kernel for the trapezoid oracle: φ-averaged transverse weight
/// (1 + c²)/2 + (1 − 3c²)/2·μ² against cos(k R μ), with elementary μ moments
/// and a fixed composite Gauss–Legendre rule in k.
struct PlainKernel {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl PlainKernel {
    const K_MAX: f64 = 40.0;

    fn new(max_frequency: f64) -> Self {
        // 16-point Gauss–Legendre on [−1, 1]
        const X: [f64; 8] = [
            0.095_012_509_837_637_44,
            0.281_603_550_779_258_9,
            0.458_016_777_657_227_4,
            0.617_876_244_402_643_7,
            0.755_404_408_355_003,
            0.865_631_202_387_831_7,
            0.944_575_023_073_232_6,
            0.989_400_934_991_649_9,
        ];
        const W: [f64; 8] = [
            0.189_450_610_455_068_5,
            0.182_603_415_044_923_6,
            0.169_156_519_395_002_5,
            0.149_595_988_816_576_7,
            0.124_628_971_255_533_9,
            0.095_158_511_682_492_78,
            0.062_253_523_938_647_89,
            0.027_152_459_411_754_09,
        ];
        let width = (PI / max_frequency.max(1e-9)).min(0.5);
        let panels = (Self::K_MAX / width).ceil() as usize;
        let h = Self::K_MAX / panels as f64;
        let mut nodes = Vec::with_capacity(16 * panels);
        let mut weights = Vec::with_capacity(16 * panels);
        for p in 0..panels {
            let mid = (p as f64 + 0.5) * h;
            for (x, w) in X.iter().zip(W.iter()) {
                for sign in [-1.0, 1.0] {
                    nodes.push(mid + sign * 0.5 * h * x);
                    weights.push(0.5 * h * w);
                }
            }
        }
        PlainKernel { nodes, weights }
    }

    /// ẑ·G(r, u)·ẑ.
    fn eval(&self, r: [f64; 3], u: f64) -> f64 {
        let rn = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        let c2 = if rn > 0.0 { (r[2] / rn).powi(2) } else { 0.0 };
        let a0 = 0.5 * (1.0 + c2);
        let a2 = 0.5 * (1.0 - 3.0 * c2);
        let mut acc = 0.0;
        for (&k, &w) in self.nodes.iter().zip(&self.weights) {
            let (m0, m2) = mu_moments(k * rn);
            let bose = k / k.exp_m1();
            acc += w * bose * (k * u).cos() * 0.5 * (a0 * m0 + a2 * m2);
        }
        2.0 / PI * acc
    }
}

/// (∫₋₁¹ cos(xμ) dμ, ∫₋₁¹ μ² cos(xμ) dμ).
fn mu_moments(x: f64) -> (f64, f64) {
    if x.abs() < 0.5 {
        let x2 = x * x;
        let mut m0 = 0.0;
        let mut m2 = 0.0;
        let mut pow = 1.0;
        let mut fact = 1.0;
        for j in 0..12 {
            let jf = j as f64;
            if j > 0 {
                pow *= -x2;
                fact *= (2.0 * jf - 1.0) * (2.0 * jf);
            }
            m0 += pow / fact * 2.0 / (2.0 * jf + 1.0);
            m2 += pow / fact * 2.0 / (2.0 * jf + 3.0);
        }
        (m0, m2)
    } else {
        let (s, c) = x.sin_cos();
        (2.0 * s / x, 2.0 * s / x + 4.0 * c / (x * x) - 4.0 * s / (x * x * x))
    }
}

/// Plain 2D trapezoid of the three-term kernel bracket over the (s, τ)
/// square, at n and 2n intervals, Richardson-extrapolated.
///
/// The error bar is |T₂ₙ − Tₙ|/3, the leading error of the finer sum.
pub fn trapezoid_s_oracle(pt: &DimensionlessPoint, n: usize) -> Result<OracleReport> {
    let (value, bar) = trapezoid_s_value(pt, n)?;
    let engine = s_exact(pt, 1e-11)?;
    let allowed = bar + engine.error_estimate + 1e-12 * value.abs();
    Ok(OracleReport::new(
        format!(
            "S trapezoid (tau_hat={}, y_hat={}, v={}, cos_py={}, n={n})",
            pt.tau_hat, pt.y_hat, pt.v, pt.cos_py
        ),
        value,
        engine.s_value,
        bar,
        allowed,
        "combined error bars",
    ))
}

/// Richardson value and error bar of the trapezoid oracle, without the engine comparison.
pub fn trapezoid_s_value(pt: &DimensionlessPoint, n: usize) -> Result<(f64, f64)> {
    pt.validate()?;
    if n < 64 {
        return Err(Error::InvalidArgument(format!("trapezoid oracle needs n >= 64, got {n}")));
    }
    let scale = pt.alpha_eff * pt.v * pt.v;
    let t = pt.tau_hat;
    if scale == 0.0 || t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let fine = 2 * n;
    let h = t / fine as f64;
    let sin = (1.0 - pt.cos_py * pt.cos_py).max(0.0).sqrt();
    let y = [pt.y_hat * sin, 0.0, pt.y_hat * pt.cos_py];
    let kernel = PlainKernel::new(t + pt.y_hat + t * pt.v);
    // the bracket depends on (s, τ) only through the lag s − τ = m·h
    let lags: Vec<f64> = (0..=2 * fine)
        .into_par_iter()
        .map(|idx| {
            let u = (idx as f64 - fine as f64) * h;
            let d = u * pt.v;
            let plus = [y[0], y[1], y[2] + d];
            let minus = [-y[0], -y[1], -y[2] + d];
            kernel.eval([0.0, 0.0, d], u) - 0.5 * kernel.eval(plus, u) - 0.5 * kernel.eval(minus, u)
        })
        .collect();
    let sum = |stride: usize| {
        let m = fine / stride;
        let hh = h * stride as f64;
        let mut acc = 0.0;
        for i in 0..=m {
            let wi = if i == 0 || i == m { 0.5 } else { 1.0 };
            for j in 0..=m {
                let wj = if j == 0 || j == m { 0.5 } else { 1.0 };
                let lag = (i as isize - j as isize) * stride as isize + fine as isize;
                acc += wi * wj * lags[lag as usize];
            }
        }
        acc * hh * hh
    };
    let coarse = sum(2);
    let finer = sum(1);
    let rich = (4.0 * finer - coarse) / 3.0;
    Ok((scale * rich, scale * (finer - coarse).abs() / 3.0))
}

/// ζ(s) for s ∈ {2, 4}: compensated direct sum to 10⁶ plus a midpoint integral tail.
pub fn zeta_sums(s: u32) -> Result<f64> {
    if s != 2 && s != 4 {
        return Err(Error::InvalidArgument(format!("zeta_sums supports s = 2 or 4, got {s}")));
    }
    let n_max = 1_000_000u64;
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for n in (1..=n_max).rev() {
        let term = (n as f64).powi(-(s as i32));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let tail = (n_max as f64 + 0.5).powi(1 - s as i32) / (s as f64 - 1.0);
    Ok(sum + tail)
}

/// Checks the series engine's ζ-integrals against [`zeta_sums`].
pub fn zeta_report(s: u32) -> Result<OracleReport> {
    let direct = zeta_sums(s)?;
    let (power, factor) = if s == 2 { (1, 1.0) } else { (3, 6.0) };
    let spec = BoseIntegralSpec::new(power, Trig::Constant, 0.0)?;
    let engine = bose_series(&spec, 1e-13)?.value / factor;
    Ok(OracleReport::new(format!("zeta({s})"), direct, engine, 1e-13, 1e-12, "1e-12 absolute"))
}
