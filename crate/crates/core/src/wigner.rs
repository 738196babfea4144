//! One-dimensional Wigner transforms of off-diagonal density-matrix slices
//! and the two sides of the momentum-damping evolution law.
//!
//! Units are reduced with ħ = 1: separations u in thermal lengths, wave
//! numbers k in inverse thermal lengths.
//!
//! The damping law ∂ₜW = −b k² W is implemented as the pointwise factor
//! exp(−b k² t) in [`momentum_damping_evolve`]. The double commutator
//! −b[P, [P, ρ]] is implemented separately in [`double_commutator_apply`]; in
//! center/relative coordinates it equals b·∂²ρ/∂q² and so annihilates every
//! translation-invariant ρ(u). The two are therefore not the same generator.
//! Both are kept as written and compared numerically, with no attempt to
//! guess a reconciling operator. Coupling to position instead of momentum is
//! not implemented.

use crate::error::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Relative tolerance for Hermiticity and realness checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// ρ(q + u/2, q − u/2) at a fixed center q, on a grid symmetric about u = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySlice {
    pub u_grid: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl DensitySlice {
    pub fn new(u_grid: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        let s = DensitySlice { u_grid, values };
        s.validate()?;
        Ok(s)
    }

    /// Samples `f(u)` on a uniform symmetric grid of 2n+1 points spanning [−half_width, half_width].
    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let grid = symmetric_grid(half_width, n)?;
        let values = grid.iter().map(|&u| f(u)).collect();
        Self::new(grid, values)
    }

    /// exp(−a u²/2 − i p u).
    pub fn gaussian(a: f64, p: f64, half_width: f64, n: usize) -> Result<Self> {
        if !(a > 0.0) {
            return Err(Error::InvalidArgument(format!("gaussian width parameter must be positive, got {a}")));
        }
        Self::from_fn(half_width, n, |u| Complex64::new(-0.5 * a * u * u, -p * u).exp())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.u_grid.len();
        if n != self.values.len() {
            return Err(Error::InvalidGrid("u grid and values differ in length".into()));
        }
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidGrid("u grid needs an odd number (≥ 3) of points centered on 0".into()));
        }
        if self.u_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidGrid("u grid must be strictly increasing".into()));
        }
        let span = self.u_grid[n - 1] - self.u_grid[0];
        for i in 0..n / 2 + 1 {
            if (self.u_grid[i] + self.u_grid[n - 1 - i]).abs() > 1e-12 * span {
                return Err(Error::InvalidGrid("u grid must be symmetric about 0".into()));
            }
        }
        let scale = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let mut residual = 0.0f64;
        for i in 0..n {
            let d = self.values[n - 1 - i] - self.values[i].conj();
            residual = residual.max(d.norm());
        }
        if residual > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonHermitian { residual });
        }
        let rho0 = self.values[n / 2].re;
        if self.values.iter().any(|v| v.norm() > rho0 * (1.0 + HERMITIAN_TOL) + HERMITIAN_TOL * scale) {
            return Err(Error::InvalidArgument("|rho(u)| exceeds rho(0)".into()));
        }
        Ok(())
    }

    pub fn max_spacing(&self) -> f64 {
        self.u_grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }
}

fn symmetric_grid(half_width: f64, n: usize) -> Result<Vec<f64>> {
    if !(half_width > 0.0 && half_width.is_finite()) || n == 0 {
        return Err(Error::InvalidGrid("need a positive half width and at least one point per side".into()));
    }
    let h = half_width / n as f64;
    Ok((0..=2 * n).map(|i| (i as f64 - n as f64) * h).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WignerGrid {
    pub k_grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl WignerGrid {
    /// Trapezoid estimate of ∫W dk.
    pub fn integral(&self) -> f64 {
        self.k_grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(k, w)| 0.5 * (k[1] - k[0]) * (w[0] + w[1]))
            .sum()
    }
}

/// W(k) = (1/2π)∫du e^{iku} ρ(u), trapezoid rule on the slice grid.
pub fn wigner_transform(slice: &DensitySlice, k_grid: &[f64]) -> Result<WignerGrid> {
    slice.validate()?;
    let limit = PI / slice.max_spacing();
    let k_max = k_grid.iter().fold(0.0f64, |m, k| m.max(k.abs()));
    if k_max > limit {
        return Err(Error::Nyquist { k_max, limit });
    }
    let u = &slice.u_grid;
    let n = u.len();
    let weights: Vec<f64> = (0..n)
        .map(|i| {
            let left = if i > 0 { u[i] - u[i - 1] } else { 0.0 };
            let right = if i + 1 < n { u[i + 1] - u[i] } else { 0.0 };
            0.5 * (left + right)
        })
        .collect();
    let scale = slice.values.iter().map(|v| v.norm()).fold(0.0, f64::max) * (u[n - 1] - u[0]) / (2.0 * PI);
    let sums: Vec<Complex64> = k_grid
        .par_iter()
        .map(|&k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..n {
                acc += Complex64::from_polar(weights[i], k * u[i]) * slice.values[i];
            }
            acc / (2.0 * PI)
        })
        .collect();
    let residual = sums.iter().map(|s| s.im.abs()).fold(0.0, f64::max);
    if residual > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NonHermitian { residual });
    }
    Ok(WignerGrid {
        k_grid: k_grid.to_vec(),
        values: sums.iter().map(|s| s.re).collect(),
    })
}

/// Closed-form transform of exp(−a u²/2 − i p u).
pub fn gaussian_wigner(a: f64, p: f64, k: f64) -> f64 {
    (2.0 * PI / a).sqrt() * (-(k - p) * (k - p) / (2.0 * a)).exp() / (2.0 * PI)
}

/// W_t(k) = exp(−b k² t)·W₀(k).
pub fn momentum_damping_evolve(grid: &WignerGrid, b: f64, t: f64) -> Result<WignerGrid> {
    if !(b >= 0.0 && b.is_finite()) || !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "damping rate and time must be non-negative, got b = {b}, t = {t}"
        )));
    }
    let values = grid
        .k_grid
        .iter()
        .zip(&grid.values)
        .map(|(&k, &w)| (-b * k * k * t).exp() * w)
        .collect();
    Ok(WignerGrid {
        k_grid: grid.k_grid.clone(),
        values,
    })
}

/// ρ(q + u/2, q − u/2) on a uniform q grid times a u grid; `values[i][j]` is at (q_i, u_j).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityPatch {
    pub q_grid: Vec<f64>,
    pub u_grid: Vec<f64>,
    pub values: Vec<Vec<Complex64>>,
}

impl DensityPatch {
    pub fn from_fn(q_grid: Vec<f64>, u_grid: Vec<f64>, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let values = q_grid
            .iter()
            .map(|&q| u_grid.iter().map(|&u| f(q, u)).collect())
            .collect();
        DensityPatch { q_grid, u_grid, values }
    }

    /// Copies of one slice at every center, i.e. a translation-invariant ρ(u).
    pub fn translation_invariant(slice: &DensitySlice, q_grid: Vec<f64>) -> Self {
        let values = vec![slice.values.clone(); q_grid.len()];
        DensityPatch {
            q_grid,
            u_grid: slice.u_grid.clone(),
            values,
        }
    }

    /// Slice at row i.
    pub fn slice(&self, i: usize) -> DensitySlice {
        DensitySlice {
            u_grid: self.u_grid.clone(),
            values: self.values[i].clone(),
        }
    }
}

/// −b[P, [P, ρ]] = b·∂²ρ/∂q², by the three-point stencil in q.
///
/// The result lives on the interior centers q₁ … q_{n−2}.
pub fn double_commutator_apply(patch: &DensityPatch, b: f64) -> Result<DensityPatch> {
    let n = patch.q_grid.len();
    if n < 3 {
        return Err(Error::InvalidGrid("need at least three centers for the q stencil".into()));
    }
    if patch.values.len() != n || patch.values.iter().any(|r| r.len() != patch.u_grid.len()) {
        return Err(Error::InvalidGrid("patch values do not match the grids".into()));
    }
    let h = patch.q_grid[1] - patch.q_grid[0];
    if !(h > 0.0) || patch.q_grid.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h) {
        return Err(Error::InvalidGrid("q grid must be uniform and increasing".into()));
    }
    if !b.is_finite() {
        return Err(Error::InvalidArgument("b must be finite".into()));
    }
    let c = b / (h * h);
    let values = (1..n - 1)
        .map(|i| {
            (0..patch.u_grid.len())
                .map(|j| (patch.values[i + 1][j] - patch.values[i][j] * 2.0 + patch.values[i - 1][j]) * c)
                .collect()
        })
        .collect();
    Ok(DensityPatch {
        q_grid: patch.q_grid[1..n - 1].to_vec(),
        u_grid: patch.u_grid.clone(),
        values,
    })
}

/// Symbol of the three-point stencil acting on e^{iκq}: (2cos κh − 2)/h².
pub fn stencil_symbol(kappa: f64, h: f64) -> f64 {
    (2.0 * (kappa * h).cos() - 2.0) / (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn gaussian_pairs() {
        let ks = k_grid(-5.0, 5.0, 201);
        for a in [0.5, 1.0, 2.0] {
            for p in [0.0, 0.3, -0.3] {
                let s = DensitySlice::gaussian(a, p, 14.0, 700).unwrap();
                let w = wigner_transform(&s, &ks).unwrap();
                for (k, v) in ks.iter().zip(&w.values) {
                    assert!((v - gaussian_wigner(a, p, *k)).abs() < 1e-8, "a={a} p={p} k={k}");
                }
            }
        }
    }

    #[test]
    fn narrow_slice_gives_broad_w() {
        let s = DensitySlice::gaussian(50.0, 0.0, 1.0, 400).unwrap();
        let w = wigner_transform(&s, &[0.0, 3.0]).unwrap();
        assert!(w.values[1] / w.values[0] > 0.9);
    }

    #[test]
    fn normalization() {
        let s = DensitySlice::gaussian(1.0, 0.3, 14.0, 700).unwrap();
        let w = wigner_transform(&s, &k_grid(-10.0, 10.0, 2001)).unwrap();
        assert!((w.integral() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn nyquist_and_hermiticity() {
        let s = DensitySlice::gaussian(1.0, 0.0, 10.0, 10).unwrap();
        assert!(matches!(wigner_transform(&s, &[0.0, 4.0]), Err(Error::Nyquist { .. })));
        let bad = DensitySlice {
            u_grid: vec![-1.0, 0.0, 1.0],
            values: vec![Complex64::new(0.5, 0.1), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.1)],
        };
        assert!(matches!(wigner_transform(&bad, &[0.0]), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn damping_identity_and_gaussian_product() {
        let ks = k_grid(-4.0, 4.0, 81);
        let w0 = WignerGrid {
            values: ks.iter().map(|&k| gaussian_wigner(1.0, 0.3, k)).collect(),
            k_grid: ks.clone(),
        };
        assert_eq!(momentum_damping_evolve(&w0, 0.0, 3.0).unwrap(), w0);
        assert_eq!(momentum_damping_evolve(&w0, 2.0, 0.0).unwrap(), w0);
        let wt = momentum_damping_evolve(&w0, 0.5, 2.0).unwrap();
        for (k, v) in ks.iter().zip(&wt.values) {
            // exp(−(k−p)²/2a)·exp(−k²) as one Gaussian
            let (a, p) = (1.0, 0.3);
            let prec = 1.0 / a + 2.0;
            let mean = (p / a) / prec;
            let expo = -0.5 * prec * (k - mean) * (k - mean) - 0.5 * (p * p / a - mean * mean * prec);
            let closed = (2.0 * PI / a).sqrt() / (2.0 * PI) * expo.exp();
            assert!((v - closed).abs() < 1e-10);
        }
        let zero = ks.iter().position(|&k| k == 0.0).unwrap();
        assert_eq!(wt.values[zero], w0.values[zero]);
        assert!(momentum_damping_evolve(&w0, -1.0, 1.0).is_err());
    }

    #[test]
    fn commutator_kills_translation_invariant_slices() {
        let s = DensitySlice::gaussian(1.0, 0.3, 6.0, 60).unwrap();
        let q = k_grid(-1.0, 1.0, 11);
        let out = double_commutator_apply(&DensityPatch::translation_invariant(&s, q), 0.7).unwrap();
        assert!(out.values.iter().flatten().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn commutator_two_mode_eigenvalue() {
        let (k, kp, b) = (1.3, -0.4, 0.25);
        let h = 0.01;
        let q: Vec<f64> = (0..9).map(|i| i as f64 * h).collect();
        let u = vec![-0.5, 0.0, 0.5];
        // e^{ikx} e^{−ik′x′} with x = q + u/2, x′ = q − u/2
        let patch = DensityPatch::from_fn(q, u, |q, u| {
            Complex64::new(0.0, k * (q + 0.5 * u) - kp * (q - 0.5 * u)).exp()
        });
        let out = double_commutator_apply(&patch, b).unwrap();
        let kappa: f64 = k - kp;
        for (row, i) in out.values.iter().zip(1..) {
            for (j, v) in row.iter().enumerate() {
                let rho = patch.values[i][j];
                let stencil = rho * (b * stencil_symbol(kappa, h));
                assert!((v - stencil).norm() < 1e-8);
                let exact = rho * (-b * kappa * kappa);
                assert!((v - exact).norm() < 1e-4 * b * kappa * kappa);
            }
        }
        let zero = double_commutator_apply(&patch, 0.0).unwrap();
        assert!(zero.values.iter().flatten().all(|v| v.norm() == 0.0));
        let short = DensityPatch::from_fn(vec![0.0, 0.1], vec![0.0], |_, _| Complex64::new(1.0, 0.0));
        assert!(double_commutator_apply(&short, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn semigroup(b in 0.0f64..3.0, t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
            let ks = k_grid(-3.0, 3.0, 31);
            let w0 = WignerGrid { values: ks.iter().map(|&k| gaussian_wigner(0.7, -0.2, k)).collect(), k_grid: ks };
            let a = momentum_damping_evolve(&momentum_damping_evolve(&w0, b, t1).unwrap(), b, t2).unwrap();
            let c = momentum_damping_evolve(&w0, b, t1 + t2).unwrap();
            for (x, y) in a.values.iter().zip(&c.values) {
                prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1e-300));
            }
        }

        #[test]
        fn random_hermitian_is_real_and_linear(
            amps in proptest::collection::vec(0.0f64..1.0, 3),
            freqs in proptest::collection::vec(-2.0f64..2.0, 3),
        ) {
            // mixtures of Gaussians with real positive weights are valid slices
            let mk = |i: usize| DensitySlice::gaussian(0.5 + i as f64, freqs[i], 12.0, 480).unwrap();
            let ks = k_grid(-6.0, 6.0, 61);
            let mut sum = mk(0);
            for v in sum.values.iter_mut() { *v *= amps[0]; }
            let mut parts = vec![wigner_transform(&mk(0), &ks).unwrap()];
            for i in 1..3 {
                let s = mk(i);
                for (acc, v) in sum.values.iter_mut().zip(&s.values) { *acc += v * amps[i]; }
                parts.push(wigner_transform(&s, &ks).unwrap());
            }
            if amps.iter().sum::<f64>() > 0.0 {
                let total = wigner_transform(&sum, &ks).unwrap();
                for (j, v) in total.values.iter().enumerate() {
                    let lin: f64 = (0..3).map(|i| amps[i] * parts[i].values[j]).sum();
                    prop_assert!((v - lin).abs() < 1e-12);
                }
            }
        }
    }
}
