//! Elementary special functions with stable small-argument branches.
//!
//! Every quotient with a removable singularity at zero switches to its Taylor
//! series below a fixed threshold instead of evaluating the raw ratio.

use std::f64::consts::PI;

/// Threshold below which removable singularities use Taylor limits.
pub const SMALL_ARG: f64 = 1e-3;

/// k/(eᵏ − 1), the Planck factor times k. Equals 1 at k = 0.
pub fn x_over_expm1(k: f64) -> f64 {
    if k.abs() < SMALL_ARG {
        let k2 = k * k;
        1.0 - 0.5 * k + k2 / 12.0 - k2 * k2 / 720.0
    } else {
        k / k.exp_m1()
    }
}

/// sin(x)/x.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < SMALL_ARG {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// (1 − cos x)/x², which tends to 1/2 at the origin.
pub fn one_minus_cos_over_sq(x: f64) -> f64 {
    let s = sinc(0.5 * x);
    0.5 * s * s
}

/// Spherical Bessel j₀(x) = sin(x)/x.
pub fn j0(x: f64) -> f64 {
    sinc(x)
}

/// j₁(x)/x = (sin x − x cos x)/x³; 1/3 at the origin.
pub fn j1_over_x(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 0.5 {
        // Σ_{n≥1} (−1)^{n+1} 2n x^{2n−2} / (2n+1)!
        let x2 = x * x;
        let mut term = 1.0 / 3.0;
        let mut sum = term;
        for n in 2..12 {
            let nf = n as f64;
            // ratio of consecutive terms
            term *= -x2 * nf / ((nf - 1.0) * (2.0 * nf) * (2.0 * nf + 1.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        (x.sin() - x * x.cos()) / (x * x * x)
    }
}

/// Spherical Bessel j₁(x).
pub fn j1(x: f64) -> f64 {
    x * j1_over_x(x)
}

/// 1 − 3 j₁(x)/x, which vanishes like x²/10 at the origin.
pub fn one_minus_three_j1_over_x(x: f64) -> f64 {
    if x.abs() < 1.0 {
        // Σ_{n≥2} (−1)^n 6n x^{2n−2} / (2n+1)!
        let x2 = x * x;
        let mut term = x2 / 10.0;
        let mut sum = term;
        for n in 3..16 {
            let nf = n as f64;
            term *= -x2 * nf / ((nf - 1.0) * (2.0 * nf) * (2.0 * nf + 1.0));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        1.0 - 3.0 * j1_over_x(x)
    }
}

/// ln(sinh(x)/x) for x ≥ 0.
pub fn ln_sinhc(x: f64) -> f64 {
    let x = x.abs();
    if x < 2.0 {
        // (sinh x − x)/x = Σ_{k≥1} x^{2k}/(2k+1)!
        let x2 = x * x;
        let mut term = x2 / 6.0;
        let mut sum = term;
        let mut k = 1.0;
        while term > 1e-18 * sum && k < 40.0 {
            k += 1.0;
            term *= x2 / ((2.0 * k) * (2.0 * k + 1.0));
            sum += term;
        }
        sum.ln_1p()
    } else {
        x - (2.0 * x).ln() + (-(-2.0 * x).exp()).ln_1p()
    }
}

/// L(τ) = ln(sinh(πτ)/(πτ)), the time profile shared by the large-separation laws.
pub fn time_profile(tau: f64) -> f64 {
    ln_sinhc(PI * tau)
}

/// Derivative dL/dτ = π(coth(πτ) − 1/(πτ)).
pub fn time_profile_slope(tau: f64) -> f64 {
    PI * coth_minus_inv(PI * tau)
}

/// coth(x) − 1/x; odd, ~x/3 near zero.
pub fn coth_minus_inv(x: f64) -> f64 {
    const COEFFS: [f64; 9] = [
        1.0 / 3.0,
        -1.0 / 45.0,
        2.0 / 945.0,
        -1.0 / 4725.0,
        2.0 / 93555.0,
        -1382.0 / 638_512_875.0,
        4.0 / 18_243_225.0,
        -3617.0 / 162_820_783_125.0,
        87734.0 / 38_979_295_480_125.0,
    ];
    if x.abs() < 0.3 {
        let x2 = x * x;
        let mut acc = 0.0;
        for c in COEFFS.iter().rev() {
            acc = acc * x2 + c;
        }
        acc * x
    } else {
        1.0 / x.tanh() - 1.0 / x
    }
}
