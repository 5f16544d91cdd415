//! Euler phi, Carmichael lambda, their bulk tables, and iterate chains.
//!
//! Lambda at prime powers: λ(p^e) = φ(p^e) = p^(e−1)(p−1) for odd p, while
//! the powers of two go λ(2) = 1, λ(4) = 2, λ(2^e) = 2^(e−2) for e ≥ 3.
//! General values combine prime-power parts by least common multiple, so
//! λ(n) is the exponent of the unit group mod n. A slow exponent search
//! ([`group_exponent_oracle`]) certifies the fast path in tests.

use std::path::Path;

use crate::cache::{self, TableKind};
use crate::error::{argument, Result};
use crate::sieve::{Factorization, SpfTable};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Least common multiple in 64-bit arithmetic. Inputs at table scale
/// (< 2^32) cannot overflow.
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return 0;
    }
    a / gcd(a, b) * b
}

/// Deterministic trial-division primality check for argument validation.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// φ from a factorization: product of p^(e−1)(p−1); φ(1) = 1.
pub fn euler_phi(f: &Factorization) -> u64 {
    f.factors()
        .iter()
        .map(|&(p, e)| p.pow(e - 1) * (p - 1))
        .product()
}

fn lambda_prime_power(p: u64, e: u32) -> u64 {
    if p == 2 {
        match e {
            1 => 1,
            2 => 2,
            _ => 1u64 << (e - 2),
        }
    } else {
        p.pow(e - 1) * (p - 1)
    }
}

/// λ from a factorization: lcm of the prime-power values; λ(1) = 1.
pub fn carmichael(f: &Factorization) -> u64 {
    f.factors()
        .iter()
        .fold(1u64, |acc, &(p, e)| lcm(acc, lambda_prime_power(p, e)))
}

/// Cap for the brute-force exponent search; it exists to certify the fast
/// path, not to scale.
pub const ORACLE_LIMIT: u64 = 100_000;

/// Least m ≥ 1 with a^m ≡ 1 (mod n) for every a coprime to n, found by
/// direct order search over all units. Independent of the λ formulas.
pub fn group_exponent_oracle(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(argument("modulus must be positive"));
    }
    if n > ORACLE_LIMIT {
        return Err(argument(format!(
            "oracle capped at {ORACLE_LIMIT}, got {n}"
        )));
    }
    let mut exponent = 1u64;
    for a in 2..n {
        if gcd(a, n) != 1 {
            continue;
        }
        let mut cur = a % n;
        let mut order = 1u64;
        while cur != 1 {
            cur = cur * a % n;
            order += 1;
        }
        exponent = lcm(exponent, order);
    }
    Ok(exponent)
}

/// Bulk table of φ values for `0..=limit`; entry 0 is 0, entry 1 is 1.
pub struct PhiTable {
    limit: u64,
    values: Vec<u32>,
}

/// Bulk table of λ values for `0..=limit`; entry 0 is 0, entry 1 is 1.
pub struct LambdaTable {
    limit: u64,
    values: Vec<u32>,
}

macro_rules! table_impl {
    ($ty:ident, $kind:expr) => {
        impl $ty {
            pub fn limit(&self) -> u64 {
                self.limit
            }

            pub fn value(&self, n: u64) -> u64 {
                self.values[n as usize] as u64
            }

            /// Apply the function `k` times by table lookup. Values only
            /// decrease, so every iterate stays inside the table.
            pub fn iterate(&self, n: u64, k: u32) -> u64 {
                let mut v = n;
                for _ in 0..k {
                    v = self.values[v as usize] as u64;
                }
                v
            }

            pub fn write_cache(&self, path: &Path) -> Result<()> {
                cache::write_table(path, $kind, self.limit, &self.values)
            }

            pub fn load_cache(path: &Path) -> Result<$ty> {
                let (limit, values) = cache::read_table(path, $kind)?;
                Ok($ty { limit, values })
            }
        }
    };
}

table_impl!(PhiTable, TableKind::Phi);
table_impl!(LambdaTable, TableKind::Lambda);

impl SpfTable {
    pub fn write_cache(&self, path: &Path) -> Result<()> {
        cache::write_table(path, TableKind::Spf, self.limit(), self.entries())
    }

    pub fn load_cache(path: &Path) -> Result<SpfTable> {
        let (limit, values) = cache::read_table(path, TableKind::Spf)?;
        Ok(SpfTable::from_entries(limit, values))
    }
}

/// Build φ and λ tables up to `limit` in one factorization-driven pass.
pub fn build_tables(limit: u64, spf: &SpfTable) -> Result<(PhiTable, LambdaTable)> {
    if limit < 1 {
        return Err(argument("table limit must be positive"));
    }
    if limit > spf.limit() {
        return Err(argument(format!(
            "table limit {limit} exceeds the sieve limit {}",
            spf.limit()
        )));
    }
    let size = (limit + 1) as usize;
    let mut phi = vec![0u32; size];
    let mut lambda = vec![0u32; size];
    if limit >= 1 {
        phi[1] = 1;
        lambda[1] = 1;
    }
    for n in 2..size {
        let mut m = n as u64;
        let mut ph = 1u64;
        let mut la = 1u64;
        while m > 1 {
            let p = spf.spf_at(m) as u64;
            let mut e = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            ph *= p.pow(e - 1) * (p - 1);
            la = lcm(la, lambda_prime_power(p, e));
        }
        phi[n] = ph as u32;
        lambda[n] = la as u32;
    }
    Ok((
        PhiTable { limit, values: phi },
        LambdaTable { limit, values: lambda },
    ))
}

/// The full iterate sequence for one n: φ_0(n) = n through φ_k(n), and
/// λ_1(n) through λ_k(n). Both chains are nonincreasing and λ_i(n)
/// divides φ_i(n) at every depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterateChain {
    pub n: u64,
    pub k: u32,
    pub phi_chain: Vec<u64>,
    pub lambda_chain: Vec<u64>,
}

impl IterateChain {
    pub fn phi_k(&self) -> u64 {
        *self.phi_chain.last().unwrap()
    }

    pub fn lambda_k(&self) -> u64 {
        *self.lambda_chain.last().unwrap()
    }

    /// log(n / λ_k(n))
    pub fn log_ratio(&self) -> f64 {
        (self.n as f64 / self.lambda_k() as f64).ln()
    }
}

/// Compute both iterate chains by table lookup.
pub fn iterate_chain(
    n: u64,
    k: u32,
    phi: &PhiTable,
    lambda: &LambdaTable,
) -> Result<IterateChain> {
    if n == 0 {
        return Err(argument("n must be positive"));
    }
    if k == 0 {
        return Err(argument("iteration depth k must be positive"));
    }
    if n > phi.limit() || n > lambda.limit() {
        return Err(argument(format!("{n} exceeds the table limit")));
    }
    let mut phi_chain = Vec::with_capacity(k as usize + 1);
    phi_chain.push(n);
    for _ in 0..k {
        let last = *phi_chain.last().unwrap();
        phi_chain.push(phi.value(last));
    }
    let mut lambda_chain = Vec::with_capacity(k as usize);
    lambda_chain.push(lambda.value(n));
    for _ in 1..k {
        let last = *lambda_chain.last().unwrap();
        lambda_chain.push(lambda.value(last));
    }
    Ok(IterateChain { n, k, phi_chain, lambda_chain })
}

/// q-adic valuation v_q(n). Errors when q is not prime.
pub fn valuation(q: u64, n: u64) -> Result<u32> {
    if !is_prime_u64(q) {
        return Err(argument(format!("{q} is not prime")));
    }
    if n == 0 {
        return Err(argument("n must be positive"));
    }
    Ok(valuation_unchecked(q, n))
}

pub(crate) fn valuation_unchecked(q: u64, n: u64) -> u32 {
    let mut m = n;
    let mut v = 0u32;
    while m.is_multiple_of(q) {
        m /= q;
        v += 1;
    }
    v
}

/// Both sides of the totient valuation identity
/// v_q(φ(m)) = max{0, v_q(m) − 1} + Σ_{p|m} v_q(p−1).
/// The two components are computed independently and must always agree.
pub fn phi_valuation_identity(m: u64, q: u64, spf: &SpfTable) -> Result<(u32, u32)> {
    if !is_prime_u64(q) {
        return Err(argument(format!("{q} is not prime")));
    }
    let f = spf.factorize(m)?;
    let lhs = valuation_unchecked(q, euler_phi(&f));
    let vq_m = f.exponent_of(q);
    let mut rhs = vq_m.saturating_sub(1);
    for &(p, _) in f.factors() {
        rhs += valuation_unchecked(q, p - 1);
    }
    Ok((lhs, rhs))
}
