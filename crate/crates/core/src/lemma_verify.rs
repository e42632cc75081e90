//! Grid certificates for the two analytic lemmas behind the local limit.
//!
//! The cubic remainder
//! `f_x(s) = Log((1 + x e^{is})/(1 + x)) - is x/(1+x) + (s²/2) x/(1+x)²`
//! satisfies `|f_x(s)| ≤ c x|s|³/(1-x)³` on `|s| ≤ π`, and the quadratic Weyl sum
//! `f_n(α) = Σ_{k≤n} ‖kα‖²` is at least `n/768` for `ε/n ≤ α ≤ 1/2`.

use std::cmp::Ordering;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Constant asserted for the cubic remainder bound.
pub const LEMMA1_CONSTANT: f64 = 134.0;
/// Constant of the small-`s` branch `|s| ≤ (1-x)/2`.
pub const LEMMA1_SMALL_S_CONSTANT: f64 = 2.0 / 3.0;
/// Lower bound asserted for `f_n(α)/n`.
pub const LEMMA2_CONSTANT: f64 = 1.0 / 768.0;
/// Largest `n` accepted by [`lemma2_min`].
pub const LEMMA2_MAX_N: u64 = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderSample {
    pub x: f64,
    pub s: f64,
    pub f_abs: f64,
    /// `|f_x(s)| (1-x)³ / (x|s|³)`.
    pub bound_ratio: f64,
}

fn check_x(x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(CoreError::Domain(format!("x must lie in (0, 1), got {x}")))
    }
}

/// The remainder `f_x(s)` after the linear and quadratic Taylor terms of the
/// principal logarithm. `1 + x e^{is}` stays away from zero for `x < 1`.
pub fn f_x(x: f64, s: f64) -> Result<Complex64> {
    check_x(x)?;
    let p = x / (1.0 + x);
    let q = 1.0 / (1.0 + x);
    let (sin, cos) = s.sin_cos();
    let half = (0.5 * s).sin();
    let re = 0.5 * (-4.0 * p * q * half * half).ln_1p() + 0.5 * s * s * p * q;
    let im = (p * sin).atan2(q + p * cos) - s * p;
    Ok(Complex64::new(re, im))
}

pub fn remainder_sample(x: f64, s: f64) -> Result<RemainderSample> {
    if s == 0.0 || !s.is_finite() {
        return Err(CoreError::Domain(format!("s must be finite and nonzero, got {s}")));
    }
    let f_abs = f_x(x, s)?.norm();
    Ok(RemainderSample {
        x,
        s,
        f_abs,
        bound_ratio: f_abs * (1.0 - x).powi(3) / (x * s.abs().powi(3)),
    })
}

/// Sample with the largest `bound_ratio` over the product grid.
pub fn lemma1_scan(x_grid: &[f64], s_grid: &[f64]) -> Result<RemainderSample> {
    if x_grid.is_empty() || s_grid.is_empty() {
        return Err(CoreError::Domain("empty grid".into()));
    }
    let best = x_grid
        .par_iter()
        .map(|&x| {
            let mut worst: Option<RemainderSample> = None;
            for &s in s_grid {
                let r = remainder_sample(x, s)?;
                if worst.is_none_or(|w| r.bound_ratio > w.bound_ratio) {
                    worst = Some(r);
                }
            }
            Ok(worst.expect("nonempty grid"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(best
        .into_iter()
        .reduce(|a, b| if b.bound_ratio > a.bound_ratio { b } else { a })
        .expect("nonempty grid"))
}

pub fn lemma1_max_ratio(x_grid: &[f64], s_grid: &[f64]) -> Result<f64> {
    Ok(lemma1_scan(x_grid, s_grid)?.bound_ratio)
}

/// Largest `bound_ratio` restricted to the pairs with `|s| ≤ (1-x)/2`;
/// `0` if the grid has no such pair.
pub fn lemma1_small_s_max(x_grid: &[f64], s_grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &x in x_grid {
        for &s in s_grid {
            if s.abs() <= 0.5 * (1.0 - x) {
                worst = worst.max(remainder_sample(x, s)?.bound_ratio);
            }
        }
    }
    Ok(worst)
}

/// `x ∈ {0.01, 0.02, …, 0.99}`.
pub fn lemma1_x_grid() -> Vec<f64> {
    (1..=99).map(|i| i as f64 / 100.0).collect()
}

/// `±` 200 log-spaced points from `1e-4` to `π`.
pub fn lemma1_s_grid() -> Vec<f64> {
    let (lo, hi) = (1e-4f64.ln(), std::f64::consts::PI.ln());
    let positive: Vec<f64> = (0..200)
        .map(|i| (lo + (hi - lo) * i as f64 / 199.0).exp())
        .collect();
    positive.iter().map(|s| -s).chain(positive.iter().copied()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylSample {
    pub n: u64,
    pub alpha: f64,
    pub sum_value: f64,
    /// `sum_value / n`.
    pub normalized: f64,
}

impl WeylSample {
    pub fn new(n: u64, alpha: f64) -> Self {
        let sum_value = weyl_sum(n, alpha);
        Self {
            n,
            alpha,
            sum_value,
            normalized: sum_value / n as f64,
        }
    }
}

/// Distance to the nearest integer.
fn dist_to_int(y: f64) -> f64 {
    (y - y.round()).abs()
}

/// `f_n(α) = Σ_{k≤n} ‖kα‖²`.
pub fn weyl_sum(n: u64, alpha: f64) -> f64 {
    (1..=n)
        .map(|k| {
            let d = dist_to_int(k as f64 * alpha);
            d * d
        })
        .sum()
}

/// `f_n(a/b)` from integer residues.
pub fn weyl_sum_rational(n: u64, a: u64, b: u64) -> f64 {
    assert!(b > 0, "zero denominator");
    let total: u128 = (1..=n)
        .map(|k| {
            let r = (k as u128 * a as u128) % b as u128;
            let d = r.min(b as u128 - r);
            d * d
        })
        .sum();
    total as f64 / (b as f64 * b as f64)
}

/// Where the minimum of [`lemma2_min`] was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Candidate {
    Endpoint,
    Rational { num: u64, den: u64 },
    /// Vertex `num/den` of one parabolic piece.
    Vertex { num: u128, den: u128 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Minimum {
    pub n: u64,
    pub lo: f64,
    pub hi: f64,
    pub alpha: f64,
    pub value: f64,
    pub normalized: f64,
    pub source: Candidate,
    pub candidates: usize,
}

/// Minimum of `f_n` on `[ε/n, 1/2]`.
pub fn lemma2_min(n: u64, epsilon: f64) -> Result<Lemma2Minimum> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(CoreError::Domain(format!("epsilon must lie in (0, 1/2], got {epsilon}")));
    }
    if n == 0 {
        return Err(CoreError::Domain("n must be positive".into()));
    }
    lemma2_min_on(n, epsilon / n as f64, 0.5)
}

/// Exact rational `num/den` with small integer parts.
#[derive(Debug, Clone, Copy)]
struct Frac {
    num: u64,
    den: u64,
}

impl Frac {
    fn cmp(self, other: Frac) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }

    fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// Kinks of `f_n` on `(0, 1/2]`: `‖kα‖` switches from `kα - m` to `m + 1 - kα`
/// at `α = (2m+1)/(2k)`. Returned sorted, paired with the `(k, m)` that flips.
fn sorted_breakpoints(n: u64) -> Vec<(Frac, u64, u64)> {
    let mut points = Vec::new();
    for k in 1..=n {
        let mut m = 0;
        while 2 * m < k {
            points.push((Frac { num: 2 * m + 1, den: 2 * k }, k, m));
            m += 1;
        }
    }
    points.sort_by(|a, b| a.0.cmp(b.0));
    points
}

/// Farey fractions of order `n` in `(0, 1/2]`, increasing.
fn farey_half(n: u64) -> Vec<Frac> {
    let mut out = Vec::new();
    let (mut a, mut b, mut c, mut d) = (0u64, 1u64, 1u64, n);
    while 2 * c <= d {
        out.push(Frac { num: c, den: d });
        let k = (n + b) / d;
        let (nc, nd) = (k * c - a, k * d - b);
        a = c;
        b = d;
        c = nc;
        d = nd;
    }
    out
}

/// Minimum of `f_n` on `[lo, hi] ⊂ (0, 1/2]`.
///
/// Between consecutive kinks `f_n(α) = S₂α² - 2S₁α + S₀` with `S₂ = Σk²`,
/// `S₁ = Σkℓ_k`, `S₀ = Σℓ_k²` and `ℓ_k` the integer nearest `kα`. A sweep over the
/// kinks keeps these sums as exact integers, so every rational candidate and
/// every piece vertex is evaluated from one exact numerator. Candidates: the
/// endpoints, all `a/b` with `b ≤ n`, and each vertex lying inside its piece.
/// The kinks are concave, so no other point can be a minimum.
pub fn lemma2_min_on(n: u64, lo: f64, hi: f64) -> Result<Lemma2Minimum> {
    if n > LEMMA2_MAX_N {
        return Err(CoreError::Resource {
            required: n as u128,
            budget: LEMMA2_MAX_N as u128,
        });
    }
    if n == 0 || !(lo > 0.0 && lo <= hi && hi <= 0.5) {
        return Err(CoreError::Domain(format!(
            "need n >= 1 and 0 < lo <= hi <= 1/2, got n={n}, [{lo}, {hi}]"
        )));
    }
    let s2 = (n as i128) * (n as i128 + 1) * (2 * n as i128 + 1) / 6;
    let (mut s1, mut s0) = (0i128, 0i128);

    let mut best = Lemma2Minimum {
        n,
        lo,
        hi,
        alpha: lo,
        value: weyl_sum(n, lo),
        normalized: 0.0,
        source: Candidate::Endpoint,
        candidates: 1,
    };
    let consider = |alpha: f64, value: f64, source: Candidate, best: &mut Lemma2Minimum| {
        best.candidates += 1;
        if value < best.value {
            best.alpha = alpha;
            best.value = value;
            best.source = source;
        }
    };
    consider(hi, weyl_sum(n, hi), Candidate::Endpoint, &mut best);

    let farey = farey_half(n);
    let breaks = sorted_breakpoints(n);
    let mut next_farey = 0;
    let mut piece_lo = Frac { num: 0, den: 1 };
    let mut i = 0;
    while i < breaks.len() {
        let piece_hi = breaks[i].0;

        while next_farey < farey.len() && farey[next_farey].cmp(piece_hi) != Ordering::Greater {
            let f = farey[next_farey];
            next_farey += 1;
            let alpha = f.value();
            if alpha < lo || alpha > hi {
                continue;
            }
            let (a, b) = (f.num as i128, f.den as i128);
            let numer = a * a * s2 - 2 * a * b * s1 + b * b * s0;
            let value = numer as f64 / (b * b) as f64;
            consider(alpha, value, Candidate::Rational { num: f.num, den: f.den }, &mut best);
        }

        // Vertex S₁/S₂ of the current parabola, if strictly inside the piece.
        if s1 > 0 {
            let (vn, vd) = (s1 as u128, s2 as u128);
            let above_lo = vn * piece_lo.den as u128 > piece_lo.num as u128 * vd;
            let below_hi = vn * (piece_hi.den as u128) < piece_hi.num as u128 * vd;
            let alpha = vn as f64 / vd as f64;
            if above_lo && below_hi && alpha >= lo && alpha <= hi {
                let value = (s0 * s2 - s1 * s1) as f64 / s2 as f64;
                consider(alpha, value, Candidate::Vertex { num: vn, den: vd }, &mut best);
            }
        }

        while i < breaks.len() && breaks[i].0.cmp(piece_hi) == Ordering::Equal {
            let (_, k, m) = breaks[i];
            s1 += k as i128;
            s0 += 2 * m as i128 + 1;
            i += 1;
        }
        piece_lo = piece_hi;
    }
    best.normalized = best.value / n as f64;
    Ok(best)
}

/// Independent cross-check: `points` equally spaced evaluations of
/// [`weyl_sum`] on `[lo, hi]`, then every near-minimal grid point is refined
/// on a 2000-point subgrid spanning its two neighbouring cells. Returns
/// `(α, f_n(α))`.
pub fn dense_grid_min(n: u64, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    assert!(points >= 3 && lo < hi);
    let h = (hi - lo) / (points - 1) as f64;
    let at = |i: usize| lo + h * i as f64;
    let values: Vec<f64> = (0..points).into_par_iter().map(|i| weyl_sum(n, at(i))).collect();
    let coarse = values.iter().copied().fold(f64::INFINITY, f64::min);
    // Grid error is at most S₂h²/4; anything within a generous multiple is refined.
    let s2 = (n * (n + 1) * (2 * n + 1)) as f64 / 6.0;
    let slack = 100.0 * s2 * h * h + 1e-12;
    let seeds: Vec<usize> = (0..points)
        .filter(|&i| {
            values[i] <= coarse + slack
                && (i == 0 || values[i] <= values[i - 1])
                && (i + 1 == points || values[i] <= values[i + 1])
        })
        .collect();
    seeds
        .par_iter()
        .map(|&i| {
            let a = at(i.saturating_sub(1));
            let b = at((i + 1).min(points - 1));
            (0..=2000)
                .map(|j| {
                    let alpha = a + (b - a) * j as f64 / 2000.0;
                    (alpha, weyl_sum(n, alpha))
                })
                .fold((a, f64::INFINITY), |acc, v| if v.1 < acc.1 { v } else { acc })
        })
        .reduce(|| (lo, f64::INFINITY), |x, y| if y.1 < x.1 { y } else { x })
}
