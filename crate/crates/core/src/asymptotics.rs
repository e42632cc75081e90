//! The saddle-point estimate `d_t(n) ~ A_n(t) n^{-3/4} e^{B(t)√n}` and the
//! quantities around it.
//!
//! Everything exponential is carried as a logarithm; the linear-scale
//! `estimate` field is a convenience that overflows to `+∞` for large `n`.

use std::f64::consts::PI;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta_solver::{solve_beta, BetaSolution};
use crate::bound::BoundFactor;
use crate::error::{CoreError, Result};
use crate::exact_count::{d_t_with_budget, ln_biguint, log_d_bounded, DEFAULT_WORK_BUDGET};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEstimate {
    pub n: u64,
    pub t: f64,
    /// `ln A_n(t) - ¾ ln n + B(t)√n`.
    pub log_estimate: f64,
    pub estimate: f64,
    /// `{t√n}`.
    pub frac_part: f64,
    pub ratio_to_exact: Option<f64>,
}

impl AsymptoticEstimate {
    /// Fills `ratio_to_exact` from an exact count.
    pub fn with_exact(mut self, exact: &BigUint) -> Self {
        self.ratio_to_exact = Some((ln_biguint(exact) - self.log_estimate).exp());
        self
    }
}

fn estimate_from(solution: &BetaSolution, t: &BoundFactor, n: u64) -> AsymptoticEstimate {
    let frac_part = t.frac(n);
    let nf = n as f64;
    let log_estimate = solution.amplitude.ln() - frac_part * solution.log_defect() - 0.75 * nf.ln()
        + solution.big_b * nf.sqrt();
    AsymptoticEstimate {
        n,
        t: t.value(),
        log_estimate,
        estimate: log_estimate.exp(),
        frac_part,
        ratio_to_exact: None,
    }
}

pub fn estimate_dt(n: u64, t: &BoundFactor) -> Result<AsymptoticEstimate> {
    if n == 0 {
        return Err(CoreError::Domain("n must be positive".into()));
    }
    Ok(estimate_from(&solve_beta(t.value())?, t, n))
}

/// `ln( e^{π√(n/3)} / (4·3^{1/4} n^{3/4}) )`.
pub fn log_hardy_ramanujan_d(n: u64) -> f64 {
    let nf = n as f64;
    PI * (nf / 3.0).sqrt() - 4f64.ln() - 0.25 * 3f64.ln() - 0.75 * nf.ln()
}

/// Unrestricted asymptotic `e^{π√(n/3)} / (4·3^{1/4} n^{3/4})`.
pub fn hardy_ramanujan_d(n: u64) -> f64 {
    log_hardy_ramanujan_d(n).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaddleEval {
    pub y: f64,
    /// `f_n(y) = y + ln D_{t,n}(e^{-y/√n}) / √n`.
    pub f_n_value: f64,
    /// `f'_n(y) = 1 - (1/n) Σ_{k≤L} k x^k/(1 + x^k)`.
    pub f_n_prime: f64,
}

pub fn saddle_eval(t: &BoundFactor, n: u64, y: f64) -> Result<SaddleEval> {
    if n == 0 {
        return Err(CoreError::Domain("n must be positive".into()));
    }
    let bound = t.largest_part(n);
    let root = (n as f64).sqrt();
    let step = y / root;
    let weighted: f64 = (1..=bound)
        .map(|k| k as f64 * crate::special_functions::logistic(-step * k as f64))
        .sum();
    Ok(SaddleEval {
        y,
        f_n_value: y + log_d_bounded(bound, n, y) / root,
        f_n_prime: 1.0 - weighted / n as f64,
    })
}

/// `[β√n + ln D_{t,n}(x)] - [B√n + ½ ln((1 + e^{-βt})/2) - ln(1 + e^{-βt}) {t√n}]`.
pub fn prop1_defect(t: &BoundFactor, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(CoreError::Domain("n must be positive".into()));
    }
    let sol = solve_beta(t.value())?;
    let root = (n as f64).sqrt();
    let exact = sol.beta * root + log_d_bounded(t.largest_part(n), n, sol.beta);
    let defect = sol.log_defect();
    let expansion = sol.big_b * root + 0.5 * (defect - std::f64::consts::LN_2) - defect * t.frac(n);
    Ok(exact - expansion)
}

/// Below this `|β|` the limit shape uses its expansion about `β = 0`.
pub const LIMIT_SHAPE_BETA_EPS: f64 = 1e-8;

/// `f_t(x) = (1/β) ln((1 + e^{-βx})/(1 + e^{-βt}))` for `0 ≤ x ≤ t`.
pub fn limit_shape(t: f64, x: f64) -> Result<f64> {
    let sol = solve_beta(t)?;
    limit_shape_with(&sol, x)
}

pub fn limit_shape_with(sol: &BetaSolution, x: f64) -> Result<f64> {
    let t = sol.t;
    if !(0.0..=t).contains(&x) {
        return Err(CoreError::Domain(format!("x must lie in [0, {t}], got {x}")));
    }
    let beta = sol.beta;
    if beta.abs() < LIMIT_SHAPE_BETA_EPS {
        // ln((1+e^{-βx})/(1+e^{-βt})) = β(t-x)/2 + β²(x²-t²)/8 + O(β⁴).
        return Ok(0.5 * (t - x) + beta * (x * x - t * t) / 8.0);
    }
    let num = crate::special_functions::ln_1p_exp(-beta * x);
    let den = crate::special_functions::ln_1p_exp(-beta * t);
    Ok((num - den) / beta)
}

/// One row of a comparison between exact counts and the estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub t: f64,
    pub n: u64,
    /// `⌊t√n⌋`.
    pub bound: u64,
    pub frac: f64,
    /// Decimal digits of `d_t(n)`.
    pub exact_digits: usize,
    pub log_exact: f64,
    pub log_estimate: f64,
    pub ratio: f64,
    /// Exact count in decimal.
    pub exact: String,
}

impl ComparisonRow {
    pub fn estimate(&self) -> AsymptoticEstimate {
        AsymptoticEstimate {
            n: self.n,
            t: self.t,
            log_estimate: self.log_estimate,
            estimate: self.log_estimate.exp(),
            frac_part: self.frac,
            ratio_to_exact: Some(self.ratio),
        }
    }
}

pub fn compare_one(sol: &BetaSolution, t: &BoundFactor, n: u64, budget: u128) -> Result<ComparisonRow> {
    if n == 0 {
        return Err(CoreError::Domain("n must be positive".into()));
    }
    let est = estimate_from(sol, t, n);
    let exact = d_t_with_budget(n, t, budget)?;
    let log_exact = ln_biguint(&exact);
    let digits = exact.to_string();
    Ok(ComparisonRow {
        t: t.value(),
        n,
        bound: t.largest_part(n),
        frac: est.frac_part,
        exact_digits: digits.len(),
        log_exact,
        log_estimate: est.log_estimate,
        ratio: (log_exact - est.log_estimate).exp(),
        exact: digits,
    })
}

/// Exact-versus-estimate rows for each `n`, in input order. A failing entry
/// (for instance over budget) does not stop the others.
pub fn compare_sweep(t: &BoundFactor, n_list: &[u64]) -> Result<Vec<Result<ComparisonRow>>> {
    compare_sweep_with_budget(t, n_list, DEFAULT_WORK_BUDGET)
}

pub fn compare_sweep_with_budget(
    t: &BoundFactor,
    n_list: &[u64],
    budget: u128,
) -> Result<Vec<Result<ComparisonRow>>> {
    if n_list.is_empty() {
        return Ok(Vec::new());
    }
    let sol = solve_beta(t.value())?;
    Ok(n_list
        .par_iter()
        .map(|&n| compare_one(&sol, t, n, budget))
        .collect())
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::exact_count::{d_t, d_unrestricted, log_d};
    use approx::assert_relative_eq;

    fn real(t: f64) -> BoundFactor {
        BoundFactor::from(t)
    }

    fn two() -> BoundFactor {
        BoundFactor::rational(2, 1).unwrap()
    }

    #[test]
    fn estimate_fields() {
        let e = estimate_dt(25, &two()).unwrap();
        assert_eq!(e.frac_part, 0.0);
        assert!(e.log_estimate.is_finite());
        assert_relative_eq!(e.estimate, e.log_estimate.exp());
        assert!(estimate_dt(0, &two()).is_err());
        assert!(estimate_dt(10, &real(1.2)).is_err());
    }

    #[test]
    fn ratio_at_three() {
        let t = real(3.0);
        let e = estimate_dt(10_000, &t).unwrap().with_exact(&d_t(10_000, &t).unwrap());
        let r = e.ratio_to_exact.unwrap();
        assert!((0.9..=1.1).contains(&r), "{r}");
    }

    #[test]
    fn large_t_recovers_unrestricted_asymptotic() {
        let t = real(30.0);
        let gaps: Vec<f64> = [100u64, 1000, 10_000, 100_000]
            .iter()
            .map(|&n| (estimate_dt(n, &t).unwrap().log_estimate - log_hardy_ramanujan_d(n)).abs())
            .collect();
        assert!(gaps[3] < 1e-6, "{gaps:?}");
    }

    #[test]
    fn hardy_ramanujan_behaviour() {
        assert!(hardy_ramanujan_d(1) > 0.0);
        let mut prev = hardy_ramanujan_d(2);
        for n in 3..500 {
            let v = hardy_ramanujan_d(n);
            assert!(v > prev);
            prev = v;
        }
        let ratios: Vec<f64> = [100u64, 400, 1600, 6400]
            .iter()
            .map(|&n| (ln_biguint(&d_unrestricted(n).unwrap()) - log_hardy_ramanujan_d(n)).exp())
            .collect();
        for w in ratios.windows(2) {
            assert!((w[1] - 1.0).abs() < (w[0] - 1.0).abs(), "{ratios:?}");
        }
        assert!((ratios[3] - 1.0).abs() <= 0.05);
    }

    #[test]
    fn saddle_derivative_vanishes_at_beta() {
        let t = real(3.0);
        let beta = solve_beta(3.0).unwrap().beta;
        for n in [100u64, 1000, 10_000] {
            let e = saddle_eval(&t, n, beta).unwrap();
            assert!(e.f_n_prime.abs() * (n as f64).sqrt() <= 2.0, "n={n}: {}", e.f_n_prime);
        }
        let n = 1000;
        let a = saddle_eval(&t, n, beta - 0.1).unwrap().f_n_prime;
        let b = saddle_eval(&t, n, beta).unwrap().f_n_prime;
        let c = saddle_eval(&t, n, beta + 0.1).unwrap().f_n_prime;
        assert!(a < b && b < c);
    }

    #[test]
    fn saddle_closed_form_at_two() {
        for n in [25u64, 26, 1000] {
            let l = two().largest_part(n) as f64;
            let e = saddle_eval(&two(), n, 0.0).unwrap();
            assert_relative_eq!(e.f_n_prime, 1.0 - l * (l + 1.0) / (4.0 * n as f64), max_relative = 1e-14);
            assert_relative_eq!(e.f_n_value, log_d(&two(), n, 0.0) / (n as f64).sqrt());
        }
    }

    #[test]
    fn defect_small_and_shrinking() {
        for t in [1.7, 3.0] {
            let big = prop1_defect(&real(t), 10_000).unwrap();
            let small = prop1_defect(&real(t), 1000).unwrap();
            assert!(big.abs() <= 0.02 && big.abs() < small.abs(), "t={t}: {small} -> {big}");
        }
        for n in [10u64, 99, 2500, 12_345] {
            assert!(prop1_defect(&two(), n).unwrap().abs() <= 1e-10);
        }
    }

    #[test]
    fn limit_shape_properties() {
        for t in [1.6, 2.0, 3.0, 5.0] {
            assert!(limit_shape(t, t).unwrap().abs() <= 1e-15);
            assert!(limit_shape(t, 0.0).unwrap() > 0.0);
            assert!(limit_shape(t, t + 1e-9).is_err());
            assert!(limit_shape(t, -1e-9).is_err());
        }
        let beta = solve_beta(3.0).unwrap().beta;
        assert_relative_eq!(
            limit_shape(3.0, 0.0).unwrap(),
            (2.0 / (1.0 + (-3.0 * beta).exp())).ln() / beta,
            max_relative = 1e-14
        );
        assert_eq!(limit_shape(2.0, 0.5).unwrap(), 0.75);
    }

    #[test]
    fn limit_shape_expansion_is_continuous() {
        // Just outside the expansion window the exact formula agrees with it.
        let sol = solve_beta(2.0 + 1e-7).unwrap();
        assert!(sol.beta.abs() > LIMIT_SHAPE_BETA_EPS);
        let mut tiny = sol;
        tiny.beta = 0.5 * LIMIT_SHAPE_BETA_EPS;
        for x in [0.0, 0.7, 1.9] {
            let exact = limit_shape_with(&sol, x).unwrap();
            let near = limit_shape_with(&tiny, x).unwrap();
            assert!((exact - near).abs() < 1e-7);
        }
    }

    #[test]
    fn concavity_flips_at_two() {
        let second_differences = |t: f64| -> Vec<f64> {
            let h = t / 50.0;
            (1..50)
                .map(|i| {
                    let x = i as f64 * h;
                    limit_shape(t, x - h).unwrap() - 2.0 * limit_shape(t, x).unwrap()
                        + limit_shape(t, (x + h).min(t)).unwrap()
                })
                .collect()
        };
        assert!(second_differences(1.7).iter().all(|&d| d < 0.0));
        assert!(second_differences(3.0).iter().all(|&d| d > 0.0));
    }

    #[test]
    fn sweep_order_and_errors() {
        assert!(compare_sweep(&real(3.0), &[]).unwrap().is_empty());
        let rows = compare_sweep_with_budget(&real(3.0), &[400, 100, 10_000], 1_000_000).unwrap();
        assert_eq!(rows[0].as_ref().unwrap().n, 400);
        assert_eq!(rows[1].as_ref().unwrap().n, 100);
        assert!(matches!(rows[2], Err(CoreError::Resource { .. })));
        let r = rows[0].as_ref().unwrap();
        assert_eq!(r.exact, d_t(400, &real(3.0)).unwrap().to_string());
        assert_eq!(r.exact_digits, r.exact.len());
    }

    #[test]
    fn counts_not_increasing_near_root_two() {
        // With L fixed and n past L(L+1)/4 the coefficients fall, so at t = 1.5
        // the exact counts dip each time ⌊t√n⌋ stalls.
        let t = real(1.5);
        let counts: Vec<BigUint> = (200..260).map(|n| d_t(n, &t).unwrap()).collect();
        let drops = counts.windows(2).filter(|w| w[1] < w[0]).count();
        assert!(drops > 0);
        // Far from √2 the counts increase.
        let t = real(3.0);
        let counts: Vec<BigUint> = (200..260).map(|n| d_t(n, &t).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[1] > w[0]));
    }
}
