//! First and second moments of `h_k` over primes, and the variance
//! diagnostic that controls how tightly `h_k` concentrates.
//!
//! `M1(x) = Σ_{p ≤ x} h_k(p)/p` and `M2(x) = Σ_{p ≤ x} h_k(p)²/p` are
//! computed exactly by one ordered pass over the prime list. For any
//! additive function the variance bound
//! `Σ_{n ≤ x} |h_k(n) − M1(x)|² ≤ C · x · M2(x)` holds for an absolute
//! constant C; [`tk_check`] evaluates both sides and reports the ratio.
//!
//! The passes are chunked and reduced in chunk order, so results are
//! bit-identical for any worker count.

use serde::Serialize;

use crate::error::{argument, Result};
use crate::hk::{factorial_f64, HkEvaluator, HkParams};
use crate::kahan::Kahan;
use crate::parallel::run_chunks;
use crate::sieve::SpfTable;

/// Everything one moment evaluation produces.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MomentReport {
    pub x: f64,
    pub k: u32,
    pub m1_exact: f64,
    pub m2_exact: f64,
    pub m1_predicted: f64,
    /// `Σ_{n ≤ x} |h_k(n) − m1_exact|²`
    pub tk_lhs: f64,
    /// `tk_lhs / (x · m2_exact)`, defined as 0 when `m2_exact = 0`.
    pub tk_ratio: f64,
}

const PRIME_CHUNK: usize = 8192;
const N_CHUNK: u64 = 65536;

fn check_x(x: f64, spf: &SpfTable) -> Result<u64> {
    if !x.is_finite() || x < 2.0 {
        return Err(argument(format!("x must be a finite real >= 2, got {x}")));
    }
    if x > spf.limit() as f64 {
        return Err(argument(format!(
            "x = {x} exceeds the sieve limit {}",
            spf.limit()
        )));
    }
    Ok(x as u64)
}

/// Deterministic chunked `Σ f(p)` over primes `p ≤ bound`.
fn sum_over_primes(
    spf: &SpfTable,
    bound: u64,
    threads: usize,
    f: impl Fn(u64) -> f64 + Sync,
) -> f64 {
    let primes: Vec<u64> = spf
        .primes()
        .iter()
        .map(|&p| p as u64)
        .take_while(|&p| p <= bound)
        .collect();
    let n_chunks = primes.len().div_ceil(PRIME_CHUNK);
    let partials = run_chunks(n_chunks, threads, |i| {
        let lo = i * PRIME_CHUNK;
        let hi = ((i + 1) * PRIME_CHUNK).min(primes.len());
        let mut sum = Kahan::new();
        for &p in &primes[lo..hi] {
            sum.add(f(p));
        }
        sum.value()
    });
    let mut total = Kahan::new();
    for v in partials {
        total.add(v);
    }
    total.value()
}

/// Exact `M1(x) = Σ_{p ≤ x} h_k(p)/p`.
pub fn m1_exact(x: f64, k: u32, spf: &SpfTable, threads: usize) -> Result<f64> {
    let bound = check_x(x, spf)?;
    let params = HkParams::new(x, k)?;
    let eval = HkEvaluator::new(&params, spf, bound.max(2))?;
    Ok(sum_over_primes(spf, bound, threads, |p| {
        eval.prime_weight(p) / p as f64
    }))
}

/// Exact `M2(x) = Σ_{p ≤ x} h_k(p)²/p`.
pub fn m2_exact(x: f64, k: u32, spf: &SpfTable, threads: usize) -> Result<f64> {
    let bound = check_x(x, spf)?;
    let params = HkParams::new(x, k)?;
    let eval = HkEvaluator::new(&params, spf, bound.max(2))?;
    Ok(sum_over_primes(spf, bound, threads, |p| {
        let w = eval.prime_weight(p);
        w * w / p as f64
    }))
}

/// The predicted leading term `y^k log y / (k−1)!` with `y = loglog x`.
/// Errors when `y < 1` (`log y` negative or undefined); at `y = 1` the
/// value is exactly 0.
pub fn m1_predicted(x: f64, k: u32) -> Result<f64> {
    if k == 0 {
        return Err(argument("iteration depth k must be positive"));
    }
    if !x.is_finite() || x < 2.0 {
        return Err(argument(format!("x must be a finite real >= 2, got {x}")));
    }
    let y = x.ln().ln();
    if y < 1.0 {
        return Err(argument(format!(
            "loglog x = {y} < 1, the predicted term needs x >= e^e"
        )));
    }
    Ok(y.powi(k as i32) * y.ln() / factorial_f64(k - 1))
}

/// Evaluate both sides of the additive-function variance bound. The
/// left-hand side is a full pass of `h_k` over every `n ≤ x`.
pub fn tk_check(x: f64, k: u32, spf: &SpfTable, threads: usize) -> Result<MomentReport> {
    let bound = check_x(x, spf)?;
    let params = HkParams::new(x, k)?;
    let eval = HkEvaluator::new(&params, spf, bound.max(2))?;

    let m1 = sum_over_primes(spf, bound, threads, |p| eval.prime_weight(p) / p as f64);
    let m2 = sum_over_primes(spf, bound, threads, |p| {
        let w = eval.prime_weight(p);
        w * w / p as f64
    });

    let n_chunks = bound.div_ceil(N_CHUNK) as usize;
    let partials = run_chunks(n_chunks, threads, |i| {
        let lo = (i as u64) * N_CHUNK + 1;
        let hi = ((i as u64 + 1) * N_CHUNK).min(bound);
        let mut sum = Kahan::new();
        for n in lo..=hi {
            let d = eval.hk(n, spf) - m1;
            sum.add(d * d);
        }
        sum.value()
    });
    let mut lhs = Kahan::new();
    for v in partials {
        lhs.add(v);
    }
    let tk_lhs = lhs.value();
    let tk_ratio = if m2 == 0.0 { 0.0 } else { tk_lhs / (x * m2) };

    Ok(MomentReport {
        x,
        k,
        m1_exact: m1,
        m2_exact: m2,
        m1_predicted: m1_predicted(x, k).unwrap_or(0.0),
        tk_lhs,
        tk_ratio,
    })
}
