//! The factor `t` in the largest-part bound `λ₁ ≤ t√n`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::special_functions::{frac_part, FRAC_SNAP};

/// Either an exact rational `p/q` or a floating value.
///
/// The rational form computes `⌊t√n⌋` and `{t√n}` with integer arithmetic,
/// so perfect squares give a fractional part of exactly zero. The floating
/// form snaps values within [`FRAC_SNAP`] of an integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BoundFactor {
    Rational { num: u64, den: u64 },
    Real { value: f64 },
}

impl BoundFactor {
    pub fn rational(num: u64, den: u64) -> Result<Self> {
        if num == 0 || den == 0 {
            return Err(CoreError::Domain(format!(
                "bound factor {num}/{den} must be a positive rational"
            )));
        }
        let g = num.gcd(&den);
        Ok(Self::Rational {
            num: num / g,
            den: den / g,
        })
    }

    pub fn real(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(CoreError::Domain(format!(
                "bound factor must be positive and finite, got {value}"
            )));
        }
        Ok(Self::Real { value })
    }

    pub fn value(&self) -> f64 {
        match *self {
            Self::Rational { num, den } => num as f64 / den as f64,
            Self::Real { value } => value,
        }
    }

    /// `⌊t√n⌋`, the largest admissible part.
    pub fn largest_part(&self, n: u64) -> u64 {
        match *self {
            Self::Rational { num, den } => {
                let radicand = BigUint::from(num).pow(2) * BigUint::from(n);
                (radicand.sqrt() / BigUint::from(den))
                    .to_u64()
                    .expect("largest part fits in u64")
            }
            Self::Real { value } => {
                let scaled = value * (n as f64).sqrt();
                let nearest = scaled.round();
                if (scaled - nearest).abs() < FRAC_SNAP {
                    nearest as u64
                } else {
                    scaled.floor() as u64
                }
            }
        }
    }

    /// `{t√n}`, the fractional part that drives the oscillatory factor.
    pub fn frac(&self, n: u64) -> f64 {
        match *self {
            Self::Rational { num, den } => {
                let k = self.largest_part(n);
                let lhs = BigUint::from(num).pow(2) * BigUint::from(n);
                let rhs = (BigUint::from(den) * BigUint::from(k)).pow(2);
                if lhs == rhs {
                    return 0.0;
                }
                // (p√n - qk)/q = (p²n - q²k²) / (q (p√n + qk)), free of cancellation.
                let diff = (lhs - rhs).to_f64().expect("finite");
                let (p, q) = (num as f64, den as f64);
                let denom = q * (p * (n as f64).sqrt() + q * k as f64);
                (diff / denom).clamp(0.0, 1.0 - f64::EPSILON)
            }
            Self::Real { value } => frac_part(value * (n as f64).sqrt()),
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Self::Rational { .. })
    }
}

impl fmt::Display for BoundFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Rational { num, den: 1 } => write!(f, "{num}"),
            Self::Rational { num, den } => write!(f, "{num}/{den}"),
            Self::Real { value } => write!(f, "{value}"),
        }
    }
}

impl FromStr for BoundFactor {
    type Err = CoreError;

    /// Accepts `p/q`, a bare integer (both exact), or a decimal (floating).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || CoreError::Domain(format!("cannot parse bound factor {s:?}"));
        if let Some((p, q)) = s.split_once('/') {
            let p = p.trim().parse::<u64>().map_err(|_| bad())?;
            let q = q.trim().parse::<u64>().map_err(|_| bad())?;
            return Self::rational(p, q);
        }
        if let Ok(p) = s.parse::<u64>() {
            return Self::rational(p, 1);
        }
        Self::real(s.parse::<f64>().map_err(|_| bad())?)
    }
}

impl From<f64> for BoundFactor {
    /// Panics on non-positive or non-finite input; use [`BoundFactor::real`] to handle that case.
    fn from(value: f64) -> Self {
        Self::real(value).expect("positive finite bound factor")
    }
}
