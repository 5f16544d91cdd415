//! Range scans: per-n drop statistics for the k-th lambda iterate.
//!
//! For each n in a range the scan records `φ_k(n)`, `λ_k(n)`,
//! `log(n/λ_k(n))`, the additive approximant `h_k(n)`, the small-prime
//! valuation sum `s3`, and the ratio of `log(n/λ_k(n))` to the predicted
//! main term `y^k log y/(k−1)!` (y taken from the scan ceiling x, not
//! per n, so records within one scan are comparable).
//!
//! Scans are chunked; chunks may be computed on any worker but are merged
//! in index order, so the record stream — and therefore the CSV payload —
//! is byte-identical for any worker count.

use std::io::Write;

use serde::Serialize;

use crate::arith::{LambdaTable, PhiTable};
use crate::error::{argument, Error, Result};
use crate::hk::{HkEvaluator, HkParams};
use crate::kahan::Kahan;
use crate::parallel::run_chunks_ordered;
use crate::sieve::SpfTable;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanRecord {
    pub n: u64,
    pub phi_k: u64,
    pub lambda_k: u64,
    /// log(n / λ_k(n))
    pub log_ratio: f64,
    pub hk: f64,
    /// Σ_{q ≤ y^k} v_q(φ_k(n)) log q
    pub s3: f64,
    /// log_ratio divided by the predicted main term; 0 when that term
    /// degenerates (y ≤ 1).
    pub normalized: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScanSummary {
    pub count: u64,
    pub log_ratio_mean: f64,
    pub log_ratio_median: f64,
    pub log_ratio_min: f64,
    pub log_ratio_max: f64,
    pub normalized_mean: f64,
    pub normalized_median: f64,
    pub normalized_min: f64,
    pub normalized_max: f64,
    /// How many n fall outside the window `main_term ± y^k ψ(x)/(k−1)!`.
    pub exceptional_count: u64,
    pub psi_used: f64,
}

/// CSV header, fixed.
pub const CSV_HEADER: &str = "n,phi_k,lambda_k,log_ratio,hk,s3,normalized";

const SCAN_CHUNK: u64 = 65536;

/// A prepared range scanner: owns the prime-weight evaluator for `h_k`
/// and the scan-global normalization constants.
pub struct Scanner<'a> {
    params: &'a HkParams,
    phi: &'a PhiTable,
    lambda: &'a LambdaTable,
    spf: &'a SpfTable,
    eval: HkEvaluator,
    small: Vec<(u64, f64)>,
    psi: f64,
    threads: usize,
    main_term: f64,
    window: f64,
}

impl<'a> Scanner<'a> {
    /// `hi` caps the n values this scanner will accept. `psi` overrides
    /// the default slack function; `threads` is the worker count.
    pub fn new(
        params: &'a HkParams,
        phi: &'a PhiTable,
        lambda: &'a LambdaTable,
        spf: &'a SpfTable,
        hi: u64,
        psi: Option<f64>,
        threads: usize,
    ) -> Result<Scanner<'a>> {
        if hi < 2 {
            return Err(argument("scan upper bound must be at least 2"));
        }
        if hi > phi.limit() || hi > lambda.limit() || hi > spf.limit() {
            return Err(argument(format!("{hi} exceeds the table limit")));
        }
        if (params.x() as u64) < hi {
            return Err(argument(format!(
                "scan ceiling x = {} must cover the range top {hi}",
                params.x()
            )));
        }
        let psi = match psi {
            Some(v) if v > 0.0 && v.is_finite() => v,
            Some(v) => return Err(argument(format!("psi must be positive and finite, got {v}"))),
            None => params.default_psi(),
        };
        let eval = HkEvaluator::new(params, spf, hi)?;
        let small = params.small_primes(spf);
        let main_term = params.main_term();
        let window = params.threshold() * psi / crate::hk::factorial_f64(params.k() - 1);
        Ok(Scanner {
            params,
            phi,
            lambda,
            spf,
            eval,
            small,
            psi,
            threads,
            main_term,
            window,
        })
    }

    fn record(&self, n: u64) -> ScanRecord {
        let k = self.params.k();
        let phi_k = self.phi.iterate(n, k);
        let lambda_k = self.lambda.iterate(n, k);
        let log_ratio = (n as f64 / lambda_k as f64).ln();
        let hk = self.eval.hk(n, self.spf);
        let mut s3 = 0.0;
        for &(q, log_q) in &self.small {
            let v = crate::arith::valuation_unchecked(q, phi_k);
            if v > 0 {
                s3 += v as f64 * log_q;
            }
        }
        let normalized = if self.main_term.is_finite() && self.main_term != 0.0 {
            log_ratio / self.main_term
        } else {
            0.0
        };
        ScanRecord { n, phi_k, lambda_k, log_ratio, hk, s3, normalized }
    }

    /// Scan `[lo, hi]`, streaming each chunk of records (in increasing-n
    /// order) into `sink`, and return the summary.
    pub fn scan_streamed(
        &self,
        lo: u64,
        hi: u64,
        mut sink: impl FnMut(&[ScanRecord]) -> Result<()>,
    ) -> Result<ScanSummary> {
        if lo < 2 {
            return Err(argument("scan lower bound must be at least 2"));
        }
        if lo > hi {
            return Err(argument(format!("empty range: lo = {lo} > hi = {hi}")));
        }
        if hi > self.eval.max_n() {
            return Err(argument(format!(
                "{hi} exceeds the prepared scan bound {}",
                self.eval.max_n()
            )));
        }

        let count = hi - lo + 1;
        let n_chunks = count.div_ceil(SCAN_CHUNK) as usize;

        let mut log_ratios: Vec<f64> = Vec::with_capacity(count as usize);
        let mut normalizeds: Vec<f64> = Vec::with_capacity(count as usize);
        let mut lr_sum = Kahan::new();
        let mut nz_sum = Kahan::new();
        let mut exceptional = 0u64;

        run_chunks_ordered(
            n_chunks,
            self.threads,
            self.threads.max(1) * 2,
            |i| {
                let a = lo + i as u64 * SCAN_CHUNK;
                let b = (a + SCAN_CHUNK - 1).min(hi);
                (a..=b).map(|n| self.record(n)).collect::<Vec<_>>()
            },
            |_, records: Vec<ScanRecord>| -> Result<()> {
                sink(&records)?;
                for r in &records {
                    lr_sum.add(r.log_ratio);
                    nz_sum.add(r.normalized);
                    log_ratios.push(r.log_ratio);
                    normalizeds.push(r.normalized);
                    if (r.log_ratio - self.main_term).abs() > self.window {
                        exceptional += 1;
                    }
                }
                Ok(())
            },
        )?;

        let stats = |values: &mut [f64], sum: f64| -> (f64, f64, f64, f64) {
            values.sort_by(f64::total_cmp);
            let mid = values[(values.len() - 1) / 2];
            (
                sum / values.len() as f64,
                mid,
                values[0],
                values[values.len() - 1],
            )
        };
        let (lr_mean, lr_median, lr_min, lr_max) = stats(&mut log_ratios, lr_sum.value());
        let (nz_mean, nz_median, nz_min, nz_max) = stats(&mut normalizeds, nz_sum.value());

        Ok(ScanSummary {
            count,
            log_ratio_mean: lr_mean,
            log_ratio_median: lr_median,
            log_ratio_min: lr_min,
            log_ratio_max: lr_max,
            normalized_mean: nz_mean,
            normalized_median: nz_median,
            normalized_min: nz_min,
            normalized_max: nz_max,
            exceptional_count: exceptional,
            psi_used: self.psi,
        })
    }

    /// Scan `[lo, hi]` collecting all records.
    pub fn scan(&self, lo: u64, hi: u64) -> Result<(Vec<ScanRecord>, ScanSummary)> {
        let mut records = Vec::new();
        let summary = self.scan_streamed(lo, hi, |chunk| {
            records.extend_from_slice(chunk);
            Ok(())
        })?;
        Ok((records, summary))
    }

    /// Scan and serialize the records as CSV into `out`. The payload is
    /// byte-identical for any worker count.
    pub fn scan_csv(&self, lo: u64, hi: u64, out: &mut dyn Write) -> Result<ScanSummary> {
        writeln!(out, "{CSV_HEADER}").map_err(Error::Io)?;
        self.scan_streamed(lo, hi, |chunk| {
            for r in chunk {
                write_csv_record(out, r)?;
            }
            Ok(())
        })
    }
}

fn write_csv_record(out: &mut dyn Write, r: &ScanRecord) -> Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{}",
        r.n,
        r.phi_k,
        r.lambda_k,
        format_sig12(r.log_ratio),
        format_sig12(r.hk),
        format_sig12(r.s3),
        format_sig12(r.normalized),
    )
    .map_err(Error::Io)
}

/// Format with 12 significant digits in plain decimal notation.
pub fn format_sig12(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = 11 - exponent;
    if decimals >= 0 {
        format!("{:.*}", decimals as usize, v)
    } else {
        let scale = 10f64.powi(-decimals);
        format!("{:.0}", (v / scale).round() * scale)
    }
}
