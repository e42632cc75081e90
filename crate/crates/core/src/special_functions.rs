//! Real dilogarithm and a few small numeric helpers.
//!
//! `li2` is evaluated by its power series on `|x| ≤ 1/2`; every other
//! argument in `(-∞, 1]` is mapped into that disc by the reflection
//! `Li₂(x) + Li₂(1-x) = π²/6 - ln x ln(1-x)` and the Landen transform
//! `Li₂(x) = -Li₂(x/(x-1)) - ½ ln²(1-x)` for negative `x`.

use std::f64::consts::PI;

use crate::error::{CoreError, Result};

/// `Li₂(1) = π²/6`.
pub const LI2_ONE: f64 = PI * PI / 6.0;

/// Distance from an integer below which [`frac_part`] snaps to zero.
pub const FRAC_SNAP: f64 = 1e-9;

/// Real dilogarithm `Li₂(x) = -∫₀ˣ ln(1-w)/w dw` for `x ≤ 1`.
pub fn li2(x: f64) -> Result<f64> {
    if x.is_nan() || x > 1.0 {
        return Err(CoreError::Domain(format!(
            "real dilogarithm requires x <= 1, got {x}"
        )));
    }
    if x == 1.0 {
        return Ok(LI2_ONE);
    }
    if x == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    if x >= -0.5 {
        return Ok(li2_unit(x, 1.0 - x));
    }
    // Landen: z = x/(x-1) lies in (1/3, 1) and 1 - z = 1/(1-x) exactly.
    let one_minus_x = 1.0 - x;
    let z = x / (x - 1.0);
    let lg = one_minus_x.ln();
    Ok(-li2_unit(z, 1.0 / one_minus_x) - 0.5 * lg * lg)
}

/// `Li₂` on `[-1/2, 1)`, given both `x` and an accurate `1 - x`.
fn li2_unit(x: f64, one_minus_x: f64) -> f64 {
    if x <= 0.5 {
        li2_series(x)
    } else {
        LI2_ONE - x.ln() * one_minus_x.ln() - li2_series(one_minus_x)
    }
}

/// Direct power series `Σ xᵏ/k²`, used for `|x| ≤ 1/2`.
fn li2_series(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut power = x;
    let mut k = 1.0_f64;
    loop {
        let term = power / (k * k);
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
        power *= x;
        k += 1.0;
    }
    sum
}

/// Fractional part `α - ⌊α⌋` for `α ≥ 0`.
///
/// Values within [`FRAC_SNAP`] of an integer return exactly `0`, so that
/// products such as `√2·√50` that are integers in exact arithmetic do not
/// come back as `0.9999999999999998`.
pub fn frac_part(alpha: f64) -> f64 {
    let f = alpha - alpha.floor();
    if f < FRAC_SNAP || 1.0 - f < FRAC_SNAP {
        0.0
    } else {
        f
    }
}

/// `ln(1 + eᶻ)` without overflow for large `z` or loss of precision for
/// very negative `z`.
pub fn ln_1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Logistic function `1/(1 + e^{-z})`, evaluated on the side that avoids overflow.
pub fn logistic(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}
