//! The strongly additive approximant `h_k` and the four-way prime
//! decomposition of `log(φ_k(n)/λ_k(n))`.
//!
//! Fix a scan ceiling `x` and put `y = loglog x`. Primes `q ≤ y^k` are the
//! *small* primes; they carry the main term. `h_k(n)` walks every chain of
//! primes `p_1 | n`, `p_2 | p_1 − 1`, …, `p_k | p_{k−1} − 1` (distinct
//! primes at each level) and accumulates `Σ_{q ≤ y^k} v_q(p_k − 1) log q`
//! at the bottom of each chain. Because the chains are rooted at the
//! distinct prime divisors of `n`, the function is strongly additive:
//! `h_k(mn) = h_k(m) + h_k(n)` for coprime `m, n` and `h_k(p^a) = h_k(p)`.
//!
//! [`decompose`] splits `log(φ_k(n)/λ_k(n))` exactly into four
//! nonnegative sums keyed on whether `q` is small and whether
//! `v_q(φ_k(n))` is 1: `s1 + s2 + s3 − s4` recovers the logarithm to
//! floating-point accuracy.

use std::collections::HashMap;

use serde::Serialize;

use crate::arith::valuation_unchecked;
use crate::error::{argument, Result};
use crate::sieve::SpfTable;
use crate::{LambdaTable, PhiTable};

/// Evaluation context: the ceiling `x`, the depth `k`, `y = loglog x`,
/// and the small-prime threshold `y^k`.
#[derive(Clone, Copy, Debug)]
pub struct HkParams {
    x: f64,
    k: u32,
    y: f64,
    threshold: f64,
    below_asymptotic_range: bool,
}

impl HkParams {
    /// `x` must be a finite real ≥ 2 and `k ≥ 1`. For `x ≤ e^(e^e)`
    /// (≈ 3.81 × 10^6) the asymptotic regime is out of reach and the
    /// params carry a warning flag; values stay well defined.
    pub fn new(x: f64, k: u32) -> Result<HkParams> {
        if k == 0 {
            return Err(argument("iteration depth k must be positive"));
        }
        if !x.is_finite() || x < 2.0 {
            return Err(argument(format!("x must be a finite real >= 2, got {x}")));
        }
        let y = x.ln().ln();
        let threshold = y.powi(k as i32);
        Ok(HkParams {
            x,
            k,
            y,
            threshold,
            below_asymptotic_range: x <= e_tower_3(),
        })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    /// `y = loglog x`, natural logarithms.
    pub fn y(&self) -> f64 {
        self.y
    }

    /// The small-prime cutoff `y^k`.
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// True when `x ≤ e^(e^e)`, the floor below which the normal-order
    /// statements carry no content.
    pub fn below_asymptotic_range(&self) -> bool {
        self.below_asymptotic_range
    }

    /// Leading term `y^k log y / (k−1)!`. Negative or zero for `y ≤ 1`;
    /// callers that divide by it must guard.
    pub fn main_term(&self) -> f64 {
        self.threshold * self.y.ln() / factorial_f64(self.k - 1)
    }

    /// Default slack function for exceptional-set windows:
    /// `log y / loglog y`, capped below at 1.
    pub fn default_psi(&self) -> f64 {
        let ln_y = if self.y > 0.0 { self.y.ln() } else { return 1.0 };
        if ln_y <= 0.0 {
            return 1.0;
        }
        let lnln_y = ln_y.ln();
        if lnln_y <= 0.0 {
            return 1.0;
        }
        let v = ln_y / lnln_y;
        if v.is_finite() && v > 1.0 {
            v
        } else {
            1.0
        }
    }

    /// The small primes `q ≤ y^k` with their logarithms, in increasing
    /// order. Primes beyond the sieve limit cannot divide any value the
    /// sieve can produce, so the list is capped there harmlessly.
    pub fn small_primes(&self, spf: &SpfTable) -> Vec<(u64, f64)> {
        let mut out = Vec::new();
        for &p in spf.primes() {
            let p = p as u64;
            if (p as f64) > self.threshold {
                break;
            }
            out.push((p, (p as f64).ln()));
        }
        out
    }
}

/// e^(e^e) ≈ 3 814 279.1
pub(crate) fn e_tower_3() -> f64 {
    std::f64::consts::E.exp().exp()
}

pub(crate) fn factorial_f64(m: u32) -> f64 {
    (1..=m as u64).fold(1.0, |acc, i| acc * i as f64)
}

/// `Σ v_q(m) log q` over the given small primes.
fn small_log_sum(m: u64, small: &[(u64, f64)]) -> f64 {
    let mut total = 0.0;
    for &(q, log_q) in small {
        if q > m {
            break;
        }
        let v = valuation_unchecked(q, m);
        if v > 0 {
            total += v as f64 * log_q;
        }
    }
    total
}

/// Chain weight of a prime: level 1 reads the small valuations of `p − 1`
/// directly, deeper levels recurse over the distinct prime divisors of
/// `p − 1`.
fn weight_level(level: u32, p: u64, spf: &SpfTable, small: &[(u64, f64)]) -> f64 {
    if level == 1 {
        return small_log_sum(p - 1, small);
    }
    let mut total = 0.0;
    spf.for_each_prime_divisor(p - 1, |r| {
        total += weight_level(level - 1, r, spf, small);
    });
    total
}

/// The additive approximant `h_k(n)`.
pub fn hk(n: u64, params: &HkParams, spf: &SpfTable) -> Result<f64> {
    if n == 0 {
        return Err(argument("n must be positive"));
    }
    if n > spf.limit() {
        return Err(argument(format!("{n} exceeds the sieve limit {}", spf.limit())));
    }
    let small = params.small_primes(spf);
    let mut total = 0.0;
    spf.for_each_prime_divisor(n, |p| {
        total += weight_level(params.k(), p, spf, &small);
    });
    Ok(total)
}

/// `h_k` at a prime, via the specialized sum starting one level down.
/// Agrees bit-for-bit with [`hk`] on primes.
pub fn hk_prime(p: u64, params: &HkParams, spf: &SpfTable) -> Result<f64> {
    if p > spf.limit() {
        return Err(argument(format!("{p} exceeds the sieve limit {}", spf.limit())));
    }
    if !spf.is_prime(p) {
        return Err(argument(format!("{p} is not prime")));
    }
    let small = params.small_primes(spf);
    Ok(weight_level(params.k(), p, spf, &small))
}

/// `Σ_{q ≤ y^k} v_q(φ_k(n)) log q`, the small-prime valuation sum of the
/// k-th totient iterate.
pub fn small_valuation_sum(
    n: u64,
    params: &HkParams,
    phi: &PhiTable,
    spf: &SpfTable,
) -> Result<f64> {
    if n == 0 {
        return Err(argument("n must be positive"));
    }
    if n > phi.limit() {
        return Err(argument(format!("{n} exceeds the table limit {}", phi.limit())));
    }
    let phi_k = phi.iterate(n, params.k());
    let small = params.small_primes(spf);
    Ok(small_log_sum(phi_k, &small))
}

/// Exact per-n split of `log(φ_k(n)/λ_k(n))`:
///
/// * `s1` — large primes (`q > y^k`) with `v_q(φ_k) = 1`, summing
///   `(v_q(φ_k) − v_q(λ_k)) log q`;
/// * `s2` — large primes with `v_q(φ_k) ≥ 2`, same summand;
/// * `s3` — small primes, `v_q(φ_k) log q`;
/// * `s4` — small primes, `v_q(λ_k) log q`.
///
/// `s1 + s2 + s3 − s4 = log_ratio` holds to 1e-9, and each component is
/// nonnegative because `λ_k(n)` divides `φ_k(n)`.
///
/// `s3 − hk` is usually nonnegative but *can* dip below zero: when two
/// chains of the `h_k` recursion meet at the same prime above the
/// threshold, `hk` counts that prime's small valuations once per chain
/// while `φ_k` collects them only once (the surplus lands on the large
/// prime itself, which `s3` excludes). The smallest such point at
/// `k = 2, x = 10^7` is n = 1541 = 23·67, where both chains pass
/// through 11. The `audit` command reports these sign failures.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ComponentBreakdown {
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub hk: f64,
    pub log_ratio: f64,
}

/// Compute the full [`ComponentBreakdown`] for one n.
pub fn decompose(
    n: u64,
    params: &HkParams,
    phi: &PhiTable,
    lambda: &LambdaTable,
    spf: &SpfTable,
) -> Result<ComponentBreakdown> {
    if n == 0 {
        return Err(argument("n must be positive"));
    }
    if n > phi.limit() || n > lambda.limit() || n > spf.limit() {
        return Err(argument(format!("{n} exceeds the table limit")));
    }
    let phi_k = phi.iterate(n, params.k());
    let lambda_k = lambda.iterate(n, params.k());
    debug_assert_eq!(phi_k % lambda_k, 0, "lambda_k must divide phi_k");

    let mut s1 = 0.0;
    let mut s2 = 0.0;
    let mut s3 = 0.0;
    let mut s4 = 0.0;
    for &(q, v_phi) in spf.factorize(phi_k)?.factors() {
        let v_lambda = valuation_unchecked(q, lambda_k);
        let log_q = (q as f64).ln();
        if (q as f64) <= params.threshold() {
            s3 += v_phi as f64 * log_q;
            s4 += v_lambda as f64 * log_q;
        } else if v_phi == 1 {
            s1 += (v_phi - v_lambda) as f64 * log_q;
        } else {
            s2 += (v_phi - v_lambda) as f64 * log_q;
        }
    }
    let hk_value = hk(n, params, spf)?;
    let log_ratio = ((phi_k / lambda_k) as f64).ln();
    Ok(ComponentBreakdown { s1, s2, s3, s4, hk: hk_value, log_ratio })
}

/// Bulk evaluator: precomputes the chain weight of every prime up to a
/// bound so that range scans and moment passes evaluate `h_k(n)` with one
/// table walk plus one map lookup per distinct prime divisor.
///
/// The precomputation sums weights in the same ascending-prime order as
/// the direct recursion in [`hk`], so the two paths agree bit-for-bit.
pub struct HkEvaluator {
    k: u32,
    max_n: u64,
    weights: HashMap<u64, f64>,
}

impl HkEvaluator {
    pub fn new(params: &HkParams, spf: &SpfTable, max_n: u64) -> Result<HkEvaluator> {
        if max_n < 1 {
            return Err(argument("bound must be positive"));
        }
        if max_n > spf.limit() {
            return Err(argument(format!(
                "bound {max_n} exceeds the sieve limit {}",
                spf.limit()
            )));
        }
        let small = params.small_primes(spf);
        let primes: Vec<u64> = spf
            .primes()
            .iter()
            .map(|&p| p as u64)
            .take_while(|&p| p <= max_n)
            .collect();

        let mut level: HashMap<u64, f64> = HashMap::with_capacity(primes.len());
        for &p in &primes {
            level.insert(p, small_log_sum(p - 1, &small));
        }
        for _ in 2..=params.k() {
            let mut next: HashMap<u64, f64> = HashMap::with_capacity(primes.len());
            for &p in &primes {
                let mut total = 0.0;
                spf.for_each_prime_divisor(p - 1, |r| {
                    total += level[&r];
                });
                next.insert(p, total);
            }
            level = next;
        }
        Ok(HkEvaluator { k: params.k(), max_n, weights: level })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn max_n(&self) -> u64 {
        self.max_n
    }

    /// Chain weight of a prime, i.e. `h_k(p)`.
    pub fn prime_weight(&self, p: u64) -> f64 {
        self.weights[&p]
    }

    /// `h_k(n)` for any `n` up to the precomputed bound.
    pub fn hk(&self, n: u64, spf: &SpfTable) -> f64 {
        debug_assert!(n >= 1 && n <= self.max_n);
        let mut total = 0.0;
        spf.for_each_prime_divisor(n, |p| {
            total += self.weights[&p];
        });
        total
    }
}
