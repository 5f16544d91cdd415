//! Smallest-prime-factor sieve, factorization, and prime-sum diagnostics.
//!
//! The [`SpfTable`] is the backbone of the crate: one linear-time pass marks
//! every integer up to `limit` with its least prime factor, after which any
//! `n ≤ limit` factors in O(log n) table lookups. Everything downstream
//! (totient tables, iterate chains, the additive approximant) is built on
//! these factorizations.

use crate::error::{argument, Result};
use crate::kahan::Kahan;

/// Smallest-prime-factor table for `0..=limit`.
///
/// `spf(n)` is the least prime dividing `n` for `n ≥ 2`; entries 0 and 1
/// hold the sentinel 0. `spf(n) == n` exactly when `n` is prime.
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

/// Sorted prime factorization: `(prime, exponent)` pairs with strictly
/// increasing primes. Empty exactly for n = 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiply the factorization back out.
    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product::<u64>()
    }

    /// Exponent of `p`, 0 when `p` does not divide the factored integer.
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

}

/// Hard cap on table size: entries are stored as 32-bit values.
pub const MAX_LIMIT: u64 = u32::MAX as u64;

impl SpfTable {
    /// Build the table with a linear sieve: each composite is crossed out
    /// exactly once, via its least prime factor.
    pub fn build(limit: u64) -> Result<SpfTable> {
        if limit < 2 {
            return Err(argument(format!("sieve limit must be at least 2, got {limit}")));
        }
        if limit > MAX_LIMIT {
            return Err(argument(format!(
                "sieve limit {limit} exceeds the 32-bit cap {MAX_LIMIT}"
            )));
        }
        let size = (limit + 1) as usize;
        let mut spf = vec![0u32; size];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..size {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let lp = spf[i];
            for &p in &primes {
                if p > lp {
                    break;
                }
                let m = (p as usize).checked_mul(i);
                match m {
                    Some(m) if m < size => spf[m] = p,
                    _ => break,
                }
            }
        }
        Ok(SpfTable { limit, spf, primes })
    }

    pub(crate) fn from_entries(limit: u64, spf: Vec<u32>) -> SpfTable {
        let primes = spf
            .iter()
            .enumerate()
            .skip(2)
            .filter(|&(i, &p)| p as usize == i)
            .map(|(i, _)| i as u32)
            .collect();
        SpfTable { limit, spf, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Raw table entry; 0 for indices 0 and 1.
    pub fn spf_at(&self, n: u64) -> u32 {
        self.spf[n as usize]
    }

    pub(crate) fn entries(&self) -> &[u32] {
        &self.spf
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && n <= self.limit && self.spf[n as usize] as u64 == n
    }

    /// All primes `≤ limit` in increasing order.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Factor `n` by walking the table. Errors for n = 0 or n > limit;
    /// n = 1 yields the empty factorization.
    pub fn factorize(&self, n: u64) -> Result<Factorization> {
        if n == 0 {
            return Err(argument("cannot factor 0"));
        }
        if n > self.limit {
            return Err(argument(format!(
                "{n} exceeds the sieve limit {}",
                self.limit
            )));
        }
        let mut factors = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            let mut e = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        Ok(Factorization { factors })
    }

    /// Distinct prime divisors of `n` in increasing order, without
    /// allocating exponents.
    pub(crate) fn for_each_prime_divisor(&self, n: u64, mut f: impl FnMut(u64)) {
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            while m.is_multiple_of(p) {
                m /= p;
            }
            f(p);
        }
    }

    /// Number of primes `p ≤ t` with `p ≡ 1 (mod m)`. For m = 1 every
    /// prime qualifies.
    pub fn count_progression_primes(&self, t: u64, m: u64) -> Result<u64> {
        self.check_t(t)?;
        if m == 0 {
            return Err(argument("modulus must be positive"));
        }
        let mut count = 0u64;
        for &p in &self.primes {
            let p = p as u64;
            if p > t {
                break;
            }
            if p % m == 1 % m {
                count += 1;
            }
        }
        Ok(count)
    }

    /// `Σ 1/p` (unshifted) or `Σ 1/(p−1)` (shifted) over primes `p ≤ t`,
    /// `p ≡ 1 (mod m)`.
    pub fn progression_recip_sum(&self, t: u64, m: u64, shifted: bool) -> Result<f64> {
        self.check_t(t)?;
        if m == 0 {
            return Err(argument("modulus must be positive"));
        }
        let mut sum = Kahan::new();
        for &p in &self.primes {
            let p = p as u64;
            if p > t {
                break;
            }
            if p % m == 1 % m {
                let d = if shifted { p - 1 } else { p };
                sum.add(1.0 / d as f64);
            }
        }
        Ok(sum.value())
    }

    /// `Σ_{q ≤ t} (log q)/q` over primes, natural logarithm. Tracks `log t`
    /// with a bounded gap.
    pub fn mertens_sum(&self, t: u64) -> Result<f64> {
        self.check_t(t)?;
        let mut sum = Kahan::new();
        for &p in &self.primes {
            let p = p as u64;
            if p > t {
                break;
            }
            let pf = p as f64;
            sum.add(pf.ln() / pf);
        }
        Ok(sum.value())
    }

    fn check_t(&self, t: u64) -> Result<()> {
        if t == 0 {
            return Err(argument("bound must be positive"));
        }
        if t > self.limit {
            return Err(argument(format!(
                "{t} exceeds the sieve limit {}",
                self.limit
            )));
        }
        Ok(())
    }
}
