//! Characteristic function of the size `N` under the tilted measure, and the
//! checks that turn the local limit theorem into numbers.
//!
//! `φ(s) = E(e^{isN}) = ∏_{k≤L} (q_k + p_k e^{isk})`. Every factor is handled
//! through its logarithm: `ln|q + p e^{iθ}| = ½ ln(1 - 4pq sin²(θ/2))` and the
//! principal argument `atan2(p sin θ, q + p cos θ)`. Summing principal
//! arguments is exact modulo 2π, which is all `e^{i·}` needs, and the modulus
//! never underflows before the final exponential.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boltzmann_model::BoltzmannModel;
use crate::error::{CoreError, Result};

/// Largest grid accepted by [`fourier_invert`] by default.
pub const DEFAULT_GRID_BUDGET: u64 = 1 << 22;

/// `ln φ(s)` split into `ln|φ(s)|` and an unreduced phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogCharFn {
    pub log_modulus: f64,
    pub phase: f64,
}

impl LogCharFn {
    pub fn to_complex(self) -> Complex64 {
        Complex64::from_polar(self.log_modulus.exp(), self.phase)
    }
}

/// Log of one factor `q + p e^{iθ}`, given `sin(θ/2)` and `cos θ`, `sin θ` separately
/// so that callers can supply reduced angles.
#[inline]
fn log_factor(p: f64, q: f64, half_sin: f64, sin: f64, cos: f64) -> (f64, f64) {
    let modulus = 0.5 * (-4.0 * p * q * half_sin * half_sin).ln_1p();
    let phase = (p * sin).atan2(q + p * cos);
    (modulus, phase)
}

pub fn log_char_fn(model: &BoltzmannModel, s: f64) -> LogCharFn {
    let mut log_modulus = 0.0;
    let mut phase = 0.0;
    for (i, (&p, &q)) in model.probs().iter().zip(model.complements()).enumerate() {
        let theta = s * (i + 1) as f64;
        let (sin, cos) = theta.sin_cos();
        let (m, a) = log_factor(p, q, (0.5 * theta).sin(), sin, cos);
        log_modulus += m;
        phase += a;
    }
    LogCharFn { log_modulus, phase }
}

/// `φ(s) = E(e^{isN})`.
pub fn char_fn(model: &BoltzmannModel, s: f64) -> Complex64 {
    log_char_fn(model, s).to_complex()
}

/// `|φ(u/σ) e^{-inu/σ} - e^{-u²/2}|`.
pub fn clt_pointwise_error(model: &BoltzmannModel, u: f64) -> f64 {
    if u == 0.0 {
        return 0.0;
    }
    let s = u / model.sigma();
    let lc = log_char_fn(model, s);
    let shifted = Complex64::from_polar(lc.log_modulus.exp(), lc.phase - model.n() as f64 * s);
    (shifted - Complex64::new((-0.5 * u * u).exp(), 0.0)).norm()
}

/// Largest [`clt_pointwise_error`] over a grid.
pub fn clt_max_error(model: &BoltzmannModel, u_grid: &[f64]) -> f64 {
    u_grid
        .par_iter()
        .map(|&u| clt_pointwise_error(model, u))
        .reduce(|| 0.0, f64::max)
}

/// Grid average of `φ(s_j) e^{-ins_j}`, `s_j = 2πj/M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FourierInversion {
    pub re: f64,
    pub im: f64,
    pub grid_size: u64,
}

/// `P(N = n) = (1/2π) ∫ φ(s) e^{-ins} ds`, evaluated on `M = L(L+1)/2 + 1` equally
/// spaced nodes. The integrand is a trigonometric polynomial of degree
/// `L(L+1)/2`, so the rectangle rule is exact apart from rounding.
pub fn fourier_invert(model: &BoltzmannModel) -> Result<FourierInversion> {
    fourier_invert_with_budget(model, DEFAULT_GRID_BUDGET)
}

pub fn fourier_invert_with_budget(model: &BoltzmannModel, budget: u64) -> Result<FourierInversion> {
    let l = model.bound();
    let m = l * (l + 1) / 2 + 1;
    if m > budget {
        return Err(CoreError::Resource {
            required: m as u128,
            budget: budget as u128,
        });
    }
    let n_mod = model.n() % m;
    let p = model.probs();
    let q = model.complements();
    // Angles are reduced as integers, 2π·(jk mod M)/M, so no precision is lost for large j·k.
    let step = 2.0 * PI / m as f64;
    let terms: Vec<Complex64> = (0..m)
        .into_par_iter()
        .map(|j| {
            let mut log_modulus = 0.0;
            let mut phase = 0.0;
            for k in 1..=l {
                let r = ((j as u128 * k as u128) % m as u128) as f64;
                let (sin, cos) = (step * r).sin_cos();
                let half_sin = (0.5 * step * r).sin();
                let i = (k - 1) as usize;
                let (lm, a) = log_factor(p[i], q[i], half_sin, sin, cos);
                log_modulus += lm;
                phase += a;
            }
            let shift = ((j as u128 * n_mod as u128) % m as u128) as f64;
            Complex64::from_polar(log_modulus.exp(), phase - step * shift)
        })
        .collect();
    let sum: Complex64 = terms.iter().sum();
    let avg = sum / m as f64;
    Ok(FourierInversion {
        re: avg.re,
        im: avg.im,
        grid_size: m,
    })
}

/// `ln|φ(v/√n)| / (√n v²)` for each `v`; at `v = 0` the limit `-σ²/(2n^{3/2})`.
pub fn gaussian_domination_profile(model: &BoltzmannModel, v_grid: &[f64]) -> Vec<f64> {
    let root = (model.n() as f64).sqrt();
    v_grid
        .par_iter()
        .map(|&v| {
            if v == 0.0 {
                profile_limit(model)
            } else {
                log_char_fn(model, v / root).log_modulus / (root * v * v)
            }
        })
        .collect()
}

/// Small-`v` limit of the profile, `-σ_n² / (2 n^{3/2})`.
pub fn profile_limit(model: &BoltzmannModel) -> f64 {
    -model.variance() / (2.0 * (model.n() as f64).powf(1.5))
}

/// Largest constant `A` with `profile ≤ -A` everywhere on the profile.
pub fn fit_domination_constant(profile: &[f64]) -> f64 {
    -profile.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

/// `max_w ln|φ(w)| / √n` over the grid.
pub fn tail_smallness(model: &BoltzmannModel, w_grid: &[f64]) -> f64 {
    let root = (model.n() as f64).sqrt();
    w_grid
        .par_iter()
        .map(|&w| log_char_fn(model, w).log_modulus / root)
        .reduce(|| f64::NEG_INFINITY, f64::max)
}

/// `P((N - n)/σ_n ≤ v)` from the exact law of `N`.
pub fn standardized_cdf(model: &BoltzmannModel, v_grid: &[f64]) -> Result<Vec<f64>> {
    let dist = model.size_distribution()?;
    let mut cumulative = Vec::with_capacity(dist.len());
    let mut acc = 0.0;
    for p in &dist {
        acc += p;
        cumulative.push(acc);
    }
    let n = model.n() as f64;
    let sigma = model.sigma();
    Ok(v_grid
        .iter()
        .map(|&v| {
            let cut = (n + v * sigma).floor();
            if cut < 0.0 {
                0.0
            } else {
                let idx = (cut as usize).min(cumulative.len() - 1);
                cumulative[idx]
            }
        })
        .collect())
}

/// `√(2π) σ_n P(N = n)`, which tends to 1.
pub fn local_limit_ratio(model: &BoltzmannModel) -> Result<f64> {
    Ok((2.0 * PI).sqrt() * model.sigma() * model.prob_n_exact()?)
}
