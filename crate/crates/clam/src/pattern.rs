//! Mixed φ/λ iterate patterns.
//!
//! A pattern is a word over `{P, L}` read leftmost-outermost, so `"LP"`
//! is `λ(φ(n))` and `"PPL"` is `φ(φ(λ(n)))`. For a pattern of length `t`
//! that begins with `l` copies of `P` and contains at least one `L`, the
//! normal order of `log(n/g(n))` has exponent `k_eff = t − l`:
//! `(loglog n)^(k_eff) logloglog n / (k_eff − 1)!`. The three classical
//! depth-one and depth-two cases pin the rule down:
//!
//! * `"L"`   → `l = 0`, `k_eff = 1`
//! * `"PL"`  → `l = 1`, `k_eff = 1`
//! * `"LP"`  → `l = 0`, `k_eff = 2`
//!
//! Pure-`P` patterns fall outside the statement (the totient iterates lose
//! only a `logloglog` factor per step); they still evaluate but carry no
//! predicted exponent.

use crate::arith::{LambdaTable, PhiTable};
use crate::error::{argument, Result};
use crate::hk::factorial_f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IterateSymbol {
    /// Euler phi
    Phi,
    /// Carmichael lambda
    Lambda,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IteratePattern {
    source: String,
    symbols: Vec<IterateSymbol>,
    leading_phi: usize,
    k_eff: Option<usize>,
}

impl IteratePattern {
    /// Parse a word over `{P, L}`. Any other character is rejected with
    /// its offset.
    pub fn parse(s: &str) -> Result<IteratePattern> {
        if s.is_empty() {
            return Err(argument("pattern must be nonempty"));
        }
        let mut symbols = Vec::with_capacity(s.len());
        for (offset, ch) in s.chars().enumerate() {
            match ch {
                'P' => symbols.push(IterateSymbol::Phi),
                'L' => symbols.push(IterateSymbol::Lambda),
                other => {
                    return Err(argument(format!(
                        "illegal character '{other}' at offset {offset}: pattern alphabet is {{P, L}}"
                    )))
                }
            }
        }
        let leading_phi = symbols
            .iter()
            .take_while(|&&s| s == IterateSymbol::Phi)
            .count();
        let k_eff = if symbols.contains(&IterateSymbol::Lambda) {
            Some(symbols.len() - leading_phi)
        } else {
            None
        };
        Ok(IteratePattern { source: s.to_string(), symbols, leading_phi, k_eff })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn symbols(&self) -> &[IterateSymbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Count of leading `P` symbols.
    pub fn leading_phi(&self) -> usize {
        self.leading_phi
    }

    /// Predicted exponent `k_eff = len − leading_phi`; `None` for pure-`P`
    /// patterns, which carry no prediction.
    pub fn k_eff(&self) -> Option<usize> {
        self.k_eff
    }

    /// `(k_eff − 1)!` as a float, when a prediction exists.
    pub fn predicted_factorial(&self) -> Option<f64> {
        self.k_eff.map(|k| factorial_f64(k as u32 - 1))
    }
}

/// Apply a pattern to `n`, innermost (rightmost) symbol first, by table
/// lookups.
pub fn eval_pattern(
    n: u64,
    pat: &IteratePattern,
    phi: &PhiTable,
    lambda: &LambdaTable,
) -> Result<u64> {
    if n == 0 {
        return Err(argument("n must be positive"));
    }
    if n > phi.limit() || n > lambda.limit() {
        return Err(argument(format!("{n} exceeds the table limit")));
    }
    let mut v = n;
    for sym in pat.symbols.iter().rev() {
        v = match sym {
            IterateSymbol::Phi => phi.value(v),
            IterateSymbol::Lambda => lambda.value(v),
        };
    }
    Ok(v)
}

/// Both sides of the product bound `λ(ab) ≤ b·λ(a)`. Returns
/// `(λ(ab), b·λ(a))`; the first component never exceeds the second.
pub fn product_bound_check(a: u64, b: u64, lambda: &LambdaTable) -> Result<(u64, u64)> {
    if a == 0 || b == 0 {
        return Err(argument("a and b must be positive"));
    }
    let ab = a
        .checked_mul(b)
        .filter(|&ab| ab <= lambda.limit())
        .ok_or_else(|| argument(format!("a*b = {a}*{b} exceeds the table limit")))?;
    Ok((lambda.value(ab), b * lambda.value(a)))
}
