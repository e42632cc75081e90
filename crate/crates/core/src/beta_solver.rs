//! The saddle parameter `β(t)` and the constants built from it.
//!
//! `β` is the unique root of `g(β) = ∫₀ᵗ u/(1 + e^{βu}) du = 1`. The integral
//! has closed forms in the dilogarithm,
//!
//! ```text
//! β > 0:  β² g = Li₂(1 - e^{-βt}) - ½ Li₂(1 - e^{-2βt})
//! β < 0:  γ² g = -π²/12 + γ²t²/2 + γt ln(1 + e^{-γt}) - Li₂(-e^{-γt}),  γ = -β
//! ```
//!
//! both of which cancel catastrophically as `βt → 0`, so for `|βt| ≤ 1` the
//! integrand is expanded through the series of `tanh` instead.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::bound::BoundFactor;
use crate::error::{CoreError, Result};
use crate::special_functions::{li2, ln_1p_exp};

/// Smallest admissible `t`; `β → -∞` as `t → √2⁺`.
pub const T_MIN: f64 = SQRT_2 + 1e-3;

/// Half-width of the window around `t = 2` where `β'` uses its local expansion.
pub const TWO_WINDOW: f64 = 1e-4;

/// Largest accepted `|g(β) - 1|`.
pub const RESIDUAL_TOL: f64 = 1e-12;

pub const MAX_ITERATIONS: usize = 200;

const BRACKET: (f64, f64) = (-50.0, 2.0);
const SERIES_CUTOFF: f64 = 1.0;
const TANH_TERMS: usize = 24;

/// `β(t)` together with its derived constants and solver diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaSolution {
    pub t: f64,
    pub beta: f64,
    pub beta_prime: f64,
    /// Exponential growth rate `B(t) = 2β + t ln(1 + e^{-βt})`.
    pub big_b: f64,
    /// Envelope `A(t)` of the amplitude, without the oscillatory factor.
    pub amplitude: f64,
    pub residual: f64,
    pub iterations: usize,
}

impl BetaSolution {
    /// `γ = -β`, defined on the branch `√2 < t < 2`.
    pub fn gamma(&self) -> Option<f64> {
        (self.beta < 0.0).then_some(-self.beta)
    }

    /// `ln(1 + e^{-βt})`, which is also `B'(t)`.
    pub fn log_defect(&self) -> f64 {
        ln_1p_exp(-self.beta * self.t)
    }

    /// Oscillatory factor `(1 + e^{-βt})^{-frac}`.
    pub fn oscillation(&self, frac: f64) -> f64 {
        (-frac * self.log_defect()).exp()
    }

    /// `A_n(t) = A(t) (1 + e^{-βt})^{-{t√n}}`.
    pub fn a_n(&self, t: &BoundFactor, n: u64) -> f64 {
        self.amplitude * self.oscillation(t.frac(n))
    }

    /// The amplitude in the form `½ √(β(1 + e^{-βt}) / (π(2 - t²/(1 + e^{βt}))))`.
    /// Indeterminate at `t = 2`.
    pub fn amplitude_radical(&self) -> f64 {
        amplitude_radical(self.beta, self.t)
    }
}

/// `g(β) = ∫₀ᵗ u/(1 + e^{βu}) du`.
pub fn tilt_integral(beta: f64, t: f64) -> f64 {
    let a = beta * t;
    if a.abs() <= SERIES_CUTOFF {
        return tilt_integral_series(a, t);
    }
    if a > 0.0 {
        positive_tilt_integral(a) / (beta * beta)
    } else {
        let c = -a;
        let li = li2(-(-c).exp()).expect("argument below 1");
        (-PI * PI / 12.0 + 0.5 * c * c + c * ln_1p_exp(-c) - li) / (beta * beta)
    }
}

/// `I(a) = ∫₀ᵃ v/(1 + eᵛ) dv = Li₂(1 - e^{-a}) - ½ Li₂(1 - e^{-2a})`, rewritten by
/// reflection as `π²/12 - Li₂(y) + ½ Li₂(y²) - a ln(1 + y)` with `y = e^{-a}`,
/// so that only small corrections are subtracted from the limit `π²/12`.
fn positive_tilt_integral(a: f64) -> f64 {
    let y = (-a).exp();
    let small = li2(y).expect("y < 1") - 0.5 * li2(y * y).expect("y < 1") + a * y.ln_1p();
    PI * PI / 12.0 - small
}

/// `1/(1 + eᵛ) = ½ - ½ tanh(v/2)` integrated term by term:
/// `g = t² (¼ - ½ Σⱼ cⱼ (a/2)^{2j+1} / (2j+3))` with `tanh w = Σⱼ cⱼ w^{2j+1}`.
fn tilt_integral_series(a: f64, t: f64) -> f64 {
    let coeffs = tanh_coefficients();
    let half = 0.5 * a;
    let half_sq = half * half;
    let mut power = half;
    let mut sum = 0.0;
    for (j, c) in coeffs.iter().enumerate() {
        sum += c * power / (2 * j + 3) as f64;
        power *= half_sq;
    }
    t * t * (0.25 - 0.5 * sum)
}

/// Taylor coefficients of `tanh`, from `tanh' = 1 - tanh²`.
fn tanh_coefficients() -> [f64; TANH_TERMS] {
    let mut c = [0.0; TANH_TERMS];
    c[0] = 1.0;
    for j in 1..TANH_TERMS {
        let conv: f64 = (0..j).map(|i| c[i] * c[j - 1 - i]).sum();
        c[j] = -conv / (2 * j + 1) as f64;
    }
    c
}

/// Composite Simpson evaluation of `g(β)`; a slow cross-check for the closed forms.
pub fn tilt_integral_quadrature(beta: f64, t: f64, panels: usize) -> f64 {
    let panels = panels.max(2) & !1;
    let h = t / panels as f64;
    let f = |u: f64| u / (1.0 + (beta * u).exp());
    let mut sum = f(0.0) + f(t);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(i as f64 * h);
    }
    sum * h / 3.0
}

/// Solves `g(β) = 1` and assembles the derived constants.
///
/// The root is bracketed by the sign of `g(0) - 1 = t²/4 - 1`, which also
/// fixes the sign of `β`, then refined by false position with the Illinois
/// weighting, falling back to bisection whenever the bracket stops halving.
pub fn solve_beta(t: f64) -> Result<BetaSolution> {
    if t.is_nan() || t < T_MIN || !t.is_finite() {
        return Err(CoreError::Domain(format!(
            "β(t) requires t >= √2 + 1e-3 ≈ {T_MIN:.6}, got {t}"
        )));
    }
    let h = |b: f64| tilt_integral(b, t) - 1.0;

    let at_zero = h(0.0);
    let (beta, iterations) = if at_zero == 0.0 {
        (0.0, 0)
    } else {
        let (lo, hi) = if at_zero > 0.0 {
            (0.0, BRACKET.1)
        } else {
            (BRACKET.0, 0.0)
        };
        find_root(h, lo, hi)?
    };

    let beta = polish_positive(beta, t);
    let residual = h(beta).abs();
    if residual > RESIDUAL_TOL {
        return Err(CoreError::Convergence {
            iterations,
            residual,
        });
    }
    Ok(assemble(t, beta, residual, iterations))
}

/// For `β > 0` the equation reads `β = √I(βt)`, a contraction with factor
/// `t²/(2(1 + e^{βt}))`. Where that factor is below ½ a few sweeps settle `β`
/// to within an ulp or two, which keeps `β(t)` monotone in floating point at
/// large `t`, where its true increments are a handful of ulps.
fn polish_positive(beta: f64, t: f64) -> f64 {
    let a = beta * t;
    if a <= SERIES_CUTOFF || t * t >= 1.0 + a.exp() {
        return beta;
    }
    let mut b = beta;
    for _ in 0..60 {
        let next = positive_tilt_integral(b * t).sqrt();
        if next == b {
            break;
        }
        b = next;
    }
    b
}

/// Root of a decreasing `h` with `h(lo) > 0 > h(hi)`.
fn find_root(h: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> Result<(f64, usize)> {
    let mut f_lo = h(lo);
    let mut f_hi = h(hi);
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(CoreError::Convergence {
            iterations: 0,
            residual: f_lo.abs().min(f_hi.abs()),
        });
    }
    // +1 when the last update moved `lo`, -1 for `hi`.
    let mut last_side = 0i8;
    let mut width_history = [hi - lo; 3];
    let mut best = if f_lo < -f_hi { (lo, f_lo) } else { (hi, f_hi) };

    for iter in 1..=MAX_ITERATIONS {
        let width = hi - lo;
        let stalled = width > 0.5 * width_history[2];
        width_history = [width, width_history[0], width_history[1]];

        let secant = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let x = if stalled || !(secant > lo && secant < hi) {
            0.5 * (lo + hi)
        } else {
            secant
        };
        let fx = h(x);
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx == 0.0 {
            return Ok((x, iter));
        }
        if fx > 0.0 {
            lo = x;
            f_lo = fx;
            if last_side == 1 {
                f_hi *= 0.5;
            }
            last_side = 1;
        } else {
            hi = x;
            f_hi = fx;
            if last_side == -1 {
                f_lo *= 0.5;
            }
            last_side = -1;
        }
        let scale = lo.abs().max(hi.abs());
        if best.1.abs() <= 1e-16 || hi - lo <= 2.0 * f64::EPSILON * scale {
            return Ok((best.0, iter));
        }
    }
    if best.1.abs() <= RESIDUAL_TOL {
        Ok((best.0, MAX_ITERATIONS))
    } else {
        Err(CoreError::Convergence {
            iterations: MAX_ITERATIONS,
            residual: best.1.abs(),
        })
    }
}

fn assemble(t: f64, beta: f64, residual: f64, iterations: usize) -> BetaSolution {
    let beta_prime = beta_prime_from(beta, t);
    let big_b = 2.0 * beta + t * ln_1p_exp(-beta * t);
    let amplitude = amplitude_from(beta, beta_prime, t);
    BetaSolution {
        t,
        beta,
        beta_prime,
        big_b,
        amplitude,
        residual,
        iterations,
    }
}

/// `β' = βt / (2(1 + e^{βt}) - t²)`; inside [`TWO_WINDOW`] the derivative of
/// the local expansion `β ≈ 3/t - 12/t³`, which equals `3/2` at `t = 2`.
fn beta_prime_from(beta: f64, t: f64) -> f64 {
    if (t - 2.0).abs() <= TWO_WINDOW {
        beta_prime_expansion(t)
    } else {
        beta_prime_direct(beta, t)
    }
}

fn beta_prime_expansion(t: f64) -> f64 {
    let t2 = t * t;
    -3.0 / t2 + 36.0 / (t2 * t2)
}

fn beta_prime_direct(beta: f64, t: f64) -> f64 {
    beta * t / (2.0 * (1.0 + (beta * t).exp()) - t * t)
}

/// `cosh(βt/2) √(β'/(πt))`. For large `βt` the cosh overflows long before the
/// product does, so the equivalent radical form takes over there.
fn amplitude_from(beta: f64, beta_prime: f64, t: f64) -> f64 {
    if beta * t > 40.0 {
        amplitude_radical(beta, t)
    } else {
        (0.5 * beta * t).cosh() * (beta_prime / (PI * t)).sqrt()
    }
}

fn amplitude_radical(beta: f64, t: f64) -> f64 {
    let num = beta * (1.0 + (-beta * t).exp());
    let den = PI * (2.0 - t * t / (1.0 + (beta * t).exp()));
    0.5 * (num / den).sqrt()
}

pub fn beta_prime(t: f64) -> Result<f64> {
    Ok(solve_beta(t)?.beta_prime)
}

pub fn big_b(t: f64) -> Result<f64> {
    Ok(solve_beta(t)?.big_b)
}

pub fn amplitude(t: f64) -> Result<f64> {
    Ok(solve_beta(t)?.amplitude)
}

/// `A_n(t)`, with `{t√n}` taken exactly when `t` is rational.
pub fn a_n(t: &BoundFactor, n: u64) -> Result<f64> {
    Ok(solve_beta(t.value())?.a_n(t, n))
}
