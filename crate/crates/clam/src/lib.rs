//! Bulk computation of the iterated Euler phi and Carmichael lambda
//! functions, with the statistics that govern how fast the iterates fall.
//!
//! The crate builds smallest-prime-factor sieves and bulk φ/λ tables,
//! walks k-fold iterate chains, evaluates the strongly additive
//! approximant `h_k` together with the four-way prime decomposition of
//! `log(φ_k(n)/λ_k(n))`, computes first/second moments of `h_k` over
//! primes with a variance diagnostic, and evaluates arbitrary mixed
//! φ/λ iterate patterns.
//!
//! See the `book/` guide for a narrative walk-through; the `clam` binary
//! exposes every capability on the command line.

pub mod arith;
pub mod cache;
pub mod error;
pub mod hk;
pub mod moments;
pub mod pattern;
pub mod scan;
pub mod sieve;

mod kahan;
mod parallel;

pub use arith::{
    build_tables, carmichael, euler_phi, group_exponent_oracle, iterate_chain, lcm,
    phi_valuation_identity, valuation, IterateChain, LambdaTable, PhiTable,
};
pub use error::{CacheError, Error, Result};
pub use hk::{decompose, hk, hk_prime, small_valuation_sum, ComponentBreakdown, HkEvaluator, HkParams};
pub use moments::{m1_exact, m1_predicted, m2_exact, tk_check, MomentReport};
pub use pattern::{eval_pattern, product_bound_check, IteratePattern, IterateSymbol};
pub use scan::{ScanRecord, ScanSummary, Scanner};
pub use sieve::{Factorization, SpfTable};

// Compile the guide's code blocks as doc-tests so the book and the library
// cannot drift apart. `cargo test --doc -p clam` runs them.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/chains.md")]
    mod chains {}
    #[doc = include_str!("../../../book/src/sieve.md")]
    mod sieve {}
    #[doc = include_str!("../../../book/src/hk.md")]
    mod hk {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/scans.md")]
    mod scans {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/cache.md")]
    mod cache {}
}
