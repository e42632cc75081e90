//! The tilted product measure `P_{x,n}(λ) = x^{|λ|} / D_{t,n}(x)` at the
//! saddle point `x = e^{-β/√n}`.
//!
//! Under this measure the indicator of each part `k ≤ L = ⌊t√n⌋` is an
//! independent Bernoulli variable with success probability `xᵏ/(1 + xᵏ)`,
//! and the partition size is `N = Σ k·X_k`.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::beta_solver::{solve_beta, BetaSolution};
use crate::bound::BoundFactor;
use crate::error::Result;
use crate::exact_count::{
    build_table_with_budget, d_t_with_budget, ln_biguint, log_d_bounded, Partition,
    DEFAULT_WORK_BUDGET,
};
use crate::special_functions::logistic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoltzmannModel {
    t: BoundFactor,
    n: u64,
    bound: u64,
    solution: BetaSolution,
    x: f64,
    /// `p[k-1] = P(X_k = 1)`.
    p: Vec<f64>,
    /// `q[k-1] = 1 - p[k-1]`, evaluated directly to keep precision when `p ≈ 1`.
    q: Vec<f64>,
    mean: f64,
    variance: f64,
}

/// Summary of a batch of sampled partition sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    /// Number of samples with `|λ| = n`.
    pub hits_at_n: usize,
    /// Central third moment.
    pub third_moment: f64,
    /// Central fourth moment.
    pub fourth_moment: f64,
}

impl SampleStats {
    /// Panics on an empty slice.
    pub fn from_sizes(sizes: &[u64], n: u64) -> Self {
        assert!(!sizes.is_empty(), "no samples");
        let count = sizes.len();
        let c = count as f64;
        let mean = sizes.iter().map(|&s| s as f64).sum::<f64>() / c;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &s in sizes {
            let d = s as f64 - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        Self {
            count,
            mean,
            variance: if count > 1 { m2 / (c - 1.0) } else { 0.0 },
            hits_at_n: sizes.iter().filter(|&&s| s == n).count(),
            third_moment: m3 / c,
            fourth_moment: m4 / c,
        }
    }
}

impl BoltzmannModel {
    pub fn build(t: &BoundFactor, n: u64) -> Result<Self> {
        let solution = solve_beta(t.value())?;
        Ok(Self::with_solution(t, n, solution))
    }

    /// Reuses an already solved `β(t)`; `solution.t` must equal `t.value()`.
    pub fn with_solution(t: &BoundFactor, n: u64, solution: BetaSolution) -> Self {
        debug_assert_eq!(solution.t, t.value());
        assert!(n >= 1, "model requires n >= 1");
        let bound = t.largest_part(n);
        let step = solution.beta / (n as f64).sqrt();
        let (p, q): (Vec<f64>, Vec<f64>) = (1..=bound)
            .map(|k| {
                let z = step * k as f64;
                (logistic(-z), logistic(z))
            })
            .unzip();
        let mean = p.iter().enumerate().map(|(i, pk)| (i + 1) as f64 * pk).sum();
        let variance = p
            .iter()
            .zip(&q)
            .enumerate()
            .map(|(i, (pk, qk))| {
                let k = (i + 1) as f64;
                k * k * pk * qk
            })
            .sum();
        Self {
            t: *t,
            n,
            bound,
            solution,
            x: (-step).exp(),
            p,
            q,
            mean,
            variance,
        }
    }

    pub fn t(&self) -> &BoundFactor {
        &self.t
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// `L = ⌊t√n⌋`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn solution(&self) -> &BetaSolution {
        &self.solution
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// `ln x = -β/√n`.
    pub fn ln_x(&self) -> f64 {
        -self.solution.beta / (self.n as f64).sqrt()
    }

    /// Inclusion probabilities indexed from part 1.
    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn complements(&self) -> &[f64] {
        &self.q
    }

    /// `P(X_k = 1)` for `1 ≤ k ≤ L`.
    pub fn p(&self, k: u64) -> f64 {
        self.p[(k - 1) as usize]
    }

    /// `E(N) = Σ k pₖ`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `σ_n² = Σ k² pₖ (1 - pₖ)`.
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn sigma(&self) -> f64 {
        self.variance.sqrt()
    }

    /// `ln D_{t,n}(x)` at the model's saddle point.
    pub fn log_partition_function(&self) -> f64 {
        log_d_bounded(self.bound, self.n, self.solution.beta)
    }

    /// Exact cumulants `κ₁..κ₄` of `N`.
    pub fn cumulants(&self) -> [f64; 4] {
        let mut kappa = [0.0; 4];
        for (i, (&p, &q)) in self.p.iter().zip(&self.q).enumerate() {
            let k = (i + 1) as f64;
            let pq = p * q;
            kappa[0] += k * p;
            kappa[1] += k * k * pq;
            kappa[2] += k.powi(3) * pq * (q - p);
            kappa[3] += k.powi(4) * pq * (1.0 - 6.0 * pq);
        }
        kappa
    }

    /// Draws one partition from the stream `seed` (ChaCha8, stream 0).
    pub fn sample(&self, seed: u64) -> Partition {
        self.sample_stream(seed, 0)
    }

    /// Draws from ChaCha8 seeded by `seed` on the given stream, so batches can
    /// be generated in any order and still be reproducible.
    pub fn sample_stream(&self, seed: u64, stream: u64) -> Partition {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        self.sample_with(&mut rng)
    }

    /// Includes part `k` when a uniform draw falls below `pₖ`, scanning from
    /// the largest part down so the result is already sorted.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R) -> Partition {
        let mut parts = Vec::new();
        for k in (1..=self.bound).rev() {
            let u: f64 = rng.gen();
            if u < self.p[(k - 1) as usize] {
                parts.push(k);
            }
        }
        Partition::from_sorted(parts)
    }

    /// Sample `index` of a batch uses stream `index`.
    pub fn sample_batch(&self, seed: u64, count: usize) -> Vec<Partition> {
        (0..count as u64)
            .into_par_iter()
            .map(|i| self.sample_stream(seed, i))
            .collect()
    }

    pub fn sample_stats(&self, seed: u64, count: usize) -> SampleStats {
        let sizes: Vec<u64> = (0..count as u64)
            .into_par_iter()
            .map(|i| self.sample_stream(seed, i).size())
            .collect();
        SampleStats::from_sizes(&sizes, self.n)
    }

    /// Rejection sampling conditioned on `|λ| = n`. Tries streams
    /// `0..max_attempts` in order; returns the partition and the stream used.
    pub fn sample_exact_size(&self, seed: u64, max_attempts: u64) -> Option<(Partition, u64)> {
        (0..max_attempts).find_map(|i| {
            let p = self.sample_stream(seed, i);
            (p.size() == self.n).then_some((p, i))
        })
    }

    /// `P(N = n) = d_t(n) xⁿ / D_{t,n}(x)`, assembled in log space from the exact count.
    pub fn prob_n_exact(&self) -> Result<f64> {
        self.prob_n_exact_with_budget(DEFAULT_WORK_BUDGET)
    }

    pub fn prob_n_exact_with_budget(&self, budget: u128) -> Result<f64> {
        let count = d_t_with_budget(self.n, &self.t, budget)?;
        Ok(self.prob_of_count(&count, self.n))
    }

    /// `count · xᵐ / D_{t,n}(x)`.
    pub fn prob_of_count(&self, count: &BigUint, m: u64) -> f64 {
        (ln_biguint(count) + m as f64 * self.ln_x() - self.log_partition_function()).exp()
    }

    /// The full law of `N` on `0..=L(L+1)/2` from the exact count table.
    pub fn size_distribution(&self) -> Result<Vec<f64>> {
        let mass = self.bound * (self.bound + 1) / 2;
        if self.bound == 0 {
            return Ok(vec![1.0]);
        }
        let table = build_table_with_budget(self.bound, mass, DEFAULT_WORK_BUDGET)?;
        let ln_x = self.ln_x();
        let ln_d = self.log_partition_function();
        Ok(table
            .counts()
            .iter()
            .enumerate()
            .map(|(m, c)| (ln_biguint(c) + m as f64 * ln_x - ln_d).exp())
            .collect())
    }
}

/// `t / ((1 + e^{βt}) β'(t))`, the constant in `σ_n² ~ c n^{3/2}`.
pub fn variance_constant(solution: &BetaSolution) -> f64 {
    let t = solution.t;
    t / ((1.0 + (solution.beta * t).exp()) * solution.beta_prime)
}

/// Leading-order variance `t / ((1 + e^{βt}) β'(t)) · n^{3/2}`.
pub fn variance_asymptotic(t: f64, n: f64) -> Result<f64> {
    let sol = solve_beta(t)?;
    Ok(variance_constant(&sol) * n.powf(1.5))
}

pub fn build_model(t: &BoundFactor, n: u64) -> Result<BoltzmannModel> {
    BoltzmannModel::build(t, n)
}
