//! Exact coefficients of the bounded distinct-parts product `∏_{k≤L} (1 + xᵏ)`.
//!
//! These tables are the ground truth every asymptotic check is measured
//! against, so the default path is exact big-integer arithmetic.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::bound::BoundFactor;
use crate::error::{CoreError, Result};
use crate::special_functions::ln_1p_exp;

/// Default cap on `n_max · L` coefficient updates.
pub const DEFAULT_WORK_BUDGET: u128 = 1 << 31;

/// `counts[m]` is the number of partitions of `m` into distinct parts, all at most `bound`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable {
    bound: u64,
    counts: Vec<BigUint>,
}

impl CountTable {
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn n_max(&self) -> u64 {
        self.counts.len() as u64 - 1
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn get(&self, m: u64) -> Option<&BigUint> {
        self.counts.get(usize::try_from(m).ok()?)
    }

    /// Total mass `L(L+1)/2` of all admissible parts.
    pub fn total_mass(&self) -> u64 {
        self.bound * (self.bound + 1) / 2
    }
}

/// Builds the table for parts `1..=bound` and sizes `0..=n_max` with the default budget.
pub fn build_table(bound: u64, n_max: u64) -> Result<CountTable> {
    build_table_with_budget(bound, n_max, DEFAULT_WORK_BUDGET)
}

pub fn build_table_with_budget(bound: u64, n_max: u64, budget: u128) -> Result<CountTable> {
    if bound == 0 {
        return Err(CoreError::Domain("largest part bound must be at least 1".into()));
    }
    check_budget(bound, n_max, budget)?;
    let len = usize::try_from(n_max)
        .ok()
        .and_then(|n| n.checked_add(1))
        .ok_or_else(|| CoreError::Domain(format!("n_max {n_max} too large")))?;

    let mut counts = vec![BigUint::zero(); len];
    counts[0] = BigUint::one();
    for k in 1..=bound as usize {
        // After admitting parts 1..=k nothing above k(k+1)/2 is reachable.
        let top = (k * (k + 1) / 2).min(len - 1);
        for m in (k..=top).rev() {
            let (lo, hi) = counts.split_at_mut(m);
            if !lo[m - k].is_zero() {
                hi[0] += &lo[m - k];
            }
        }
    }
    Ok(CountTable { bound, counts })
}

fn check_budget(bound: u64, n_max: u64, budget: u128) -> Result<()> {
    let required = bound as u128 * n_max as u128;
    if required > budget {
        return Err(CoreError::Resource { required, budget });
    }
    Ok(())
}

/// `d_t(n)`: partitions of `n` into distinct parts not exceeding `t√n`.
pub fn d_t(n: u64, t: &BoundFactor) -> Result<BigUint> {
    d_t_with_budget(n, t, DEFAULT_WORK_BUDGET)
}

pub fn d_t_with_budget(n: u64, t: &BoundFactor, budget: u128) -> Result<BigUint> {
    if n == 0 {
        return Err(CoreError::Domain("d_t(n) requires n >= 1".into()));
    }
    let bound = t.largest_part(n).min(n);
    if bound == 0 {
        return Ok(BigUint::zero());
    }
    let table = build_table_with_budget(bound, n, budget)?;
    Ok(table.counts[n as usize].clone())
}

/// `d(n)`: all distinct-parts partitions of `n` (parts above `n` never contribute).
pub fn d_unrestricted(n: u64) -> Result<BigUint> {
    if n == 0 {
        return Ok(BigUint::one());
    }
    let table = build_table(n, n)?;
    Ok(table.counts[n as usize].clone())
}

/// `ln D_{t,n}(x) = Σ_{k≤t√n} ln(1 + e^{-yk/√n})` by direct summation.
pub fn log_d(t: &BoundFactor, n: u64, y: f64) -> f64 {
    let bound = t.largest_part(n);
    log_d_bounded(bound, n, y)
}

pub(crate) fn log_d_bounded(bound: u64, n: u64, y: f64) -> f64 {
    let scale = y / (n as f64).sqrt();
    (1..=bound).map(|k| ln_1p_exp(-scale * k as f64)).sum()
}

/// Natural log of a big integer from its leading 64 bits and bit length.
/// Returns `-∞` for zero.
pub fn ln_biguint(value: &BigUint) -> f64 {
    let bits = value.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 64 {
        return (value.to_u64().expect("fits in 64 bits") as f64).ln();
    }
    let shift = bits - 64;
    let top = (value >> shift).to_u64().expect("top 64 bits");
    (top as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Floating log-space variant of [`build_table`] for sweeps where exact
/// integers are too expensive. Entry `m` is `ln counts[m]` (`-∞` for zero).
pub fn build_log_table(bound: u64, n_max: u64, budget: u128) -> Result<Vec<f64>> {
    if bound == 0 {
        return Err(CoreError::Domain("largest part bound must be at least 1".into()));
    }
    check_budget(bound, n_max, budget)?;
    let len = n_max as usize + 1;
    let mut logs = vec![f64::NEG_INFINITY; len];
    logs[0] = 0.0;
    for k in 1..=bound as usize {
        let top = (k * (k + 1) / 2).min(len - 1);
        for m in (k..=top).rev() {
            let add = logs[m - k];
            if add == f64::NEG_INFINITY {
                continue;
            }
            let cur = logs[m];
            logs[m] = if cur == f64::NEG_INFINITY {
                add
            } else {
                let (hi, lo) = if cur > add { (cur, add) } else { (add, cur) };
                hi + (lo - hi).exp().ln_1p()
            };
        }
    }
    Ok(logs)
}

/// A partition into distinct parts, stored largest part first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<u64>,
    size: u64,
}

impl Partition {
    /// Validates that `parts` is strictly decreasing and positive.
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.last() == Some(&0) {
            return Err(CoreError::Domain("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] <= w[1]) {
            return Err(CoreError::Domain("partition parts must be strictly decreasing".into()));
        }
        let size = parts.iter().sum();
        Ok(Self { parts, size })
    }

    /// Caller guarantees strict decrease; checked in debug builds.
    pub(crate) fn from_sorted(parts: Vec<u64>) -> Self {
        debug_assert!(parts.windows(2).all(|w| w[0] > w[1]));
        let size = parts.iter().sum();
        Self { parts, size }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn num_parts(&self) -> usize {
        self.parts.len()
    }

    pub fn largest_part(&self) -> Option<u64> {
        self.parts.first().copied()
    }
}
