//! `clam` — iterated phi/lambda tables, per-n reports, range scans,
//! moments, pattern evaluation, and prime-sum diagnostics.
//!
//! Exit codes: 0 success, 1 argument error, 2 I/O or cache error.
//! Warnings go to stderr; stdout carries only CSV/JSON payloads.

mod world;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use clam::hk::{decompose, HkParams};
use clam::moments::tk_check;
use clam::pattern::{eval_pattern, product_bound_check, IteratePattern};
use clam::scan::Scanner;
use clam::{iterate_chain, Error, Result};

/// Parse an unsigned integer, accepting scientific notation (1e7).
fn parse_u64(s: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 => {
            Ok(v as u64)
        }
        _ => Err(format!("`{s}` is not a nonnegative integer")),
    }
}

fn parse_threads(s: &str) -> std::result::Result<usize, String> {
    match parse_u64(s)? {
        0 => Err("thread count must be at least 1".into()),
        t => Ok(t as usize),
    }
}

#[derive(Parser)]
#[command(name = "clam", version, about, max_term_width = 100)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the smallest-prime-factor table and write it to disk.
    Sieve {
        /// Largest indexable integer.
        #[arg(long, value_parser = parse_u64, default_value = "1e7")]
        limit: u64,
        /// Destination file; defaults to the cache directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the iterate chains and the decomposition for a single n.
    Compute {
        #[arg(long, value_parser = parse_u64)]
        n: u64,
        /// Iteration depth.
        #[arg(long, value_parser = parse_u64, default_value = "2")]
        k: u64,
        /// Scale parameter fixing y = loglog x; defaults to max(n, 16).
        #[arg(long)]
        x: Option<f64>,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Scan a range, emitting one CSV record per n plus a JSON summary.
    Scan {
        #[arg(long, value_parser = parse_u64)]
        lo: u64,
        #[arg(long, value_parser = parse_u64)]
        hi: u64,
        #[arg(long, value_parser = parse_u64, default_value = "2")]
        k: u64,
        /// Scan ceiling; defaults to hi.
        #[arg(long)]
        x: Option<f64>,
        /// Slack value for the exceptional-set window; defaults to
        /// max(1, log y / loglog y).
        #[arg(long)]
        psi: Option<f64>,
        #[arg(long, value_parser = parse_threads, default_value = "1")]
        threads: usize,
        /// Write the CSV records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the summary as JSON to stdout (suppresses CSV on stdout).
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// First and second moments of h_k over primes, with the variance
    /// ratio.
    Moments {
        #[arg(long)]
        x: f64,
        #[arg(long, value_parser = parse_u64, default_value = "2")]
        k: u64,
        #[arg(long, value_parser = parse_threads, default_value = "1")]
        threads: usize,
        /// Print JSON instead of aligned text.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Aggregate the decomposition components over a range (or an evenly
    /// spaced sample) and report how often each stays within its window.
    Audit {
        #[arg(long)]
        x: f64,
        #[arg(long, value_parser = parse_u64, default_value = "2")]
        k: u64,
        /// Number of sample points; omit to audit every n up to x.
        #[arg(long, value_parser = parse_u64)]
        sample: Option<u64>,
        /// Slack value for the windows; defaults to max(1, log y / loglog y).
        #[arg(long)]
        psi: Option<f64>,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Evaluate a mixed phi/lambda iterate pattern at one point.
    Pattern {
        /// Word over {P, L}, leftmost outermost: "LP" is lambda(phi(n)).
        #[arg(long)]
        pattern: String,
        #[arg(long, value_parser = parse_u64)]
        n: u64,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Prime-sum diagnostics: the Mertens sum, and with --m the counts
    /// and reciprocal sums over the progression p ≡ 1 (mod m).
    Diagnostics {
        #[arg(long, value_parser = parse_u64)]
        t: u64,
        #[arg(long, value_parser = parse_u64)]
        m: Option<u64>,
        #[command(flatten)]
        limit: LimitArg,
    },
    /// Check lambda(a*b) <= b*lambda(a) at one pair.
    ProductBound {
        #[arg(long, value_parser = parse_u64)]
        a: u64,
        #[arg(long, value_parser = parse_u64)]
        b: u64,
        #[command(flatten)]
        limit: LimitArg,
    },
}

#[derive(Args)]
struct LimitArg {
    /// Table limit; defaults to the smallest table covering the request.
    #[arg(long, value_parser = parse_u64)]
    limit: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Argument(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

fn check_k(k: u64) -> Result<u32> {
    if k == 0 || k > 64 {
        return Err(argument("k must be between 1 and 64"));
    }
    Ok(k as u32)
}

/// Resolve the table limit: the explicit flag when present (validated to
/// cover the request), otherwise the smallest covering table.
fn resolve_limit(explicit: Option<u64>, needed: u64, x: Option<f64>) -> Result<u64> {
    let needed = needed.max(2);
    match explicit {
        Some(l) => {
            if l < needed {
                return Err(argument(format!(
                    "--limit {l} does not cover the requested range (need {needed})"
                )));
            }
            if let Some(x) = x {
                if x > l as f64 {
                    return Err(argument(format!("x = {x} exceeds --limit {l}")));
                }
            }
            Ok(l)
        }
        None => {
            let by_x = x.map_or(0, |x| x.ceil() as u64);
            Ok(needed.max(by_x))
        }
    }
}

fn params_with_warning(x: f64, k: u32) -> Result<HkParams> {
    let params = HkParams::new(x, k)?;
    if params.below_asymptotic_range() {
        eprintln!(
            "warning: x = {x} is at or below e^(e^e) ~ 3.81e6; the asymptotic regime \
             is out of reach at this scale and normalized statistics are descriptive only"
        );
    }
    Ok(params)
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Sieve { limit, out } => cmd_sieve(limit, out),
        Command::Compute { n, k, x, limit } => cmd_compute(n, check_k(k)?, x, limit.limit),
        Command::Scan { lo, hi, k, x, psi, threads, out, json, limit } => {
            cmd_scan(lo, hi, check_k(k)?, x, psi, threads, out, json, limit.limit)
        }
        Command::Moments { x, k, threads, json, limit } => {
            cmd_moments(x, check_k(k)?, threads, json, limit.limit)
        }
        Command::Audit { x, k, sample, psi, limit } => {
            cmd_audit(x, check_k(k)?, sample, psi, limit.limit)
        }
        Command::Pattern { pattern, n, limit } => cmd_pattern(&pattern, n, limit.limit),
        Command::Diagnostics { t, m, limit } => cmd_diagnostics(t, m, limit.limit),
        Command::ProductBound { a, b, limit } => cmd_product_bound(a, b, limit.limit),
    }
}

fn cmd_sieve(limit: u64, out: Option<PathBuf>) -> Result<()> {
    let spf = clam::SpfTable::build(limit)?;
    let path = match out {
        Some(p) => p,
        None => {
            std::fs::create_dir_all(world::cache_dir())
                .map_err(|e| Error::Cache(clam::CacheError::Io(e)))?;
            world::cache_path("spf", limit)
        }
    };
    spf.write_cache(&path)?;
    print_json(&json!({
        "kind": "spf",
        "limit": limit,
        "entries": limit + 1,
        "path": path.display().to_string(),
    }))
}

fn cmd_compute(n: u64, k: u32, x: Option<f64>, limit: Option<u64>) -> Result<()> {
    if n == 0 {
        return Err(argument("n must be positive"));
    }
    let x_value = x.unwrap_or((n as f64).max(16.0));
    let limit = resolve_limit(limit, n, x)?;
    let params = params_with_warning(x_value, k)?;
    let spf = world::load_spf(limit)?;
    let (phi, lambda) = world::load_tables(limit, &spf)?;
    let chain = iterate_chain(n, k, &phi, &lambda)?;
    let b = decompose(n, &params, &phi, &lambda, &spf)?;
    print_json(&json!({
        "n": n,
        "k": k,
        "x": x_value,
        "y": params.y(),
        "small_prime_threshold": params.threshold(),
        "phi_chain": chain.phi_chain,
        "lambda_chain": chain.lambda_chain,
        "log_n_over_lambda_k": chain.log_ratio(),
        "log_phi_k_over_lambda_k": b.log_ratio,
        "hk": b.hk,
        "s1": b.s1,
        "s2": b.s2,
        "s3": b.s3,
        "s4": b.s4,
    }))
}

#[allow(clippy::too_many_arguments)]
fn cmd_scan(
    lo: u64,
    hi: u64,
    k: u32,
    x: Option<f64>,
    psi: Option<f64>,
    threads: usize,
    out: Option<PathBuf>,
    json: bool,
    limit: Option<u64>,
) -> Result<()> {
    // validate everything before any table is built
    if lo < 2 {
        return Err(argument("scan lower bound must be at least 2"));
    }
    if lo > hi {
        return Err(argument(format!("empty range: lo = {lo} > hi = {hi}")));
    }
    if let Some(v) = psi {
        if !(v > 0.0 && v.is_finite()) {
            return Err(argument(format!("psi must be positive and finite, got {v}")));
        }
    }
    let x_value = x.unwrap_or(hi as f64);
    if (x_value as u64) < hi {
        return Err(argument(format!("scan ceiling x = {x_value} must cover the range top {hi}")));
    }
    let limit = resolve_limit(limit, hi, x)?;
    let params = params_with_warning(x_value, k)?;
    let spf = world::load_spf(limit)?;
    let (phi, lambda) = world::load_tables(limit, &spf)?;
    let scanner = Scanner::new(&params, &phi, &lambda, &spf, hi, psi, threads)?;

    let summary = match (&out, json) {
        (Some(path), _) => {
            let file = std::fs::File::create(path)?;
            let mut w = std::io::BufWriter::new(file);
            let summary = scanner.scan_csv(lo, hi, &mut w)?;
            w.flush()?;
            summary
        }
        (None, false) => {
            let stdout = std::io::stdout().lock();
            let mut w = std::io::BufWriter::new(stdout);
            let summary = scanner.scan_csv(lo, hi, &mut w)?;
            w.flush()?;
            summary
        }
        (None, true) => {
            // summary only: scan without serializing records
            scanner.scan_streamed(lo, hi, |_| Ok(()))?
        }
    };
    if json {
        print_json(&serde_json::to_value(summary).map_err(std::io::Error::from)?)?;
    }
    Ok(())
}

fn cmd_moments(x: f64, k: u32, threads: usize, json: bool, limit: Option<u64>) -> Result<()> {
    if !x.is_finite() || x < 2.0 {
        return Err(argument(format!("x must be a finite real >= 2, got {x}")));
    }
    let limit = resolve_limit(limit, x.ceil() as u64, Some(x))?;
    let _ = params_with_warning(x, k)?; // validation + warning
    let spf = world::load_spf(limit)?;
    let report = tk_check(x, k, &spf, threads)?;
    if json {
        print_json(&serde_json::to_value(report).map_err(std::io::Error::from)?)
    } else {
        let mut out = std::io::stdout().lock();
        writeln!(out, "x            = {}", report.x)?;
        writeln!(out, "k            = {}", report.k)?;
        writeln!(out, "m1_exact     = {:.12}", report.m1_exact)?;
        writeln!(out, "m2_exact     = {:.12}", report.m2_exact)?;
        writeln!(out, "m1_predicted = {:.12}", report.m1_predicted)?;
        writeln!(out, "tk_lhs       = {:.6}", report.tk_lhs)?;
        writeln!(out, "tk_ratio     = {:.9}", report.tk_ratio)?;
        Ok(())
    }
}

fn cmd_audit(x: f64, k: u32, sample: Option<u64>, psi: Option<f64>, limit: Option<u64>) -> Result<()> {
    if !x.is_finite() || x < 2.0 {
        return Err(argument(format!("x must be a finite real >= 2, got {x}")));
    }
    let hi = x as u64;
    let limit = resolve_limit(limit, hi, Some(x))?;
    let params = params_with_warning(x, k)?;
    let psi = match psi {
        Some(v) if v > 0.0 && v.is_finite() => v,
        Some(v) => return Err(argument(format!("psi must be positive and finite, got {v}"))),
        None => params.default_psi(),
    };
    let spf = world::load_spf(limit)?;
    let (phi, lambda) = world::load_tables(limit, &spf)?;

    let stride = match sample {
        Some(0) => return Err(argument("sample size must be positive")),
        Some(s) => ((hi - 1) / s).max(1),
        None => 1,
    };
    let window_large = params.threshold() * psi;
    let window_prop4 = params.threshold() / params.y() * params.y().ln().max(0.0) * psi;

    let mut count = 0u64;
    let mut sums = [0.0f64; 6]; // s1 s2 s3 s4 hk s3-hk
    let mut maxes = [f64::NEG_INFINITY; 6];
    let mut negative_s3_minus_hk = 0u64;
    let mut s1_exceed = 0u64;
    let mut s2_exceed = 0u64;
    let mut s4_exceed = 0u64;
    let mut prop4_exceed = 0u64;
    let mut n = 2u64;
    while n <= hi {
        let b = decompose(n, &params, &phi, &lambda, &spf)?;
        let fields = [b.s1, b.s2, b.s3, b.s4, b.hk, b.s3 - b.hk];
        for (i, v) in fields.into_iter().enumerate() {
            sums[i] += v;
            maxes[i] = maxes[i].max(v);
        }
        if b.s3 - b.hk < -1e-12 {
            negative_s3_minus_hk += 1;
        }
        if b.s1 > window_large {
            s1_exceed += 1;
        }
        if b.s2 > window_large {
            s2_exceed += 1;
        }
        if b.s4 > window_large {
            s4_exceed += 1;
        }
        if (b.s3 - b.hk).abs() > window_prop4 {
            prop4_exceed += 1;
        }
        count += 1;
        n += stride;
    }
    let mean = |i: usize| sums[i] / count.max(1) as f64;
    print_json(&json!({
        "x": x,
        "k": k,
        "count": count,
        "stride": stride,
        "psi_used": psi,
        "window_large_primes": window_large,
        "window_small_prime_gap": window_prop4,
        "s1": {"sum": sums[0], "mean": mean(0), "max": maxes[0], "window_exceed": s1_exceed},
        "s2": {"sum": sums[1], "mean": mean(1), "max": maxes[1], "window_exceed": s2_exceed},
        "s3": {"sum": sums[2], "mean": mean(2), "max": maxes[2]},
        "s4": {"sum": sums[3], "mean": mean(3), "max": maxes[3], "window_exceed": s4_exceed},
        "hk": {"sum": sums[4], "mean": mean(4), "max": maxes[4]},
        "s3_minus_hk": {
            "sum": sums[5],
            "mean": mean(5),
            "max": maxes[5],
            "negative_count": negative_s3_minus_hk,
            "window_exceed": prop4_exceed,
        },
    }))
}

fn cmd_pattern(pattern: &str, n: u64, limit: Option<u64>) -> Result<()> {
    let pat = IteratePattern::parse(pattern)?;
    let limit = resolve_limit(limit, n, None)?;
    let spf = world::load_spf(limit)?;
    let (phi, lambda) = world::load_tables(limit, &spf)?;
    let value = eval_pattern(n, &pat, &phi, &lambda)?;
    if pat.k_eff().is_none() {
        eprintln!("warning: pure-P pattern: no predicted exponent");
    }
    print_json(&json!({
        "pattern": pat.source(),
        "n": n,
        "value": value,
        "l": pat.leading_phi(),
        "k_eff": pat.k_eff(),
        "predicted_factorial": pat.predicted_factorial(),
    }))
}

fn cmd_diagnostics(t: u64, m: Option<u64>, limit: Option<u64>) -> Result<()> {
    if m == Some(0) {
        return Err(argument("modulus must be positive"));
    }
    let limit = resolve_limit(limit, t, None)?;
    let spf = world::load_spf(limit)?;
    let mertens = spf.mertens_sum(t)?;
    let log_t = (t as f64).ln();
    let mut payload = json!({
        "t": t,
        "mertens_sum": mertens,
        "log_t": log_t,
        "mertens_gap": mertens - log_t,
    });
    if let Some(m) = m {
        if m == 0 {
            return Err(argument("modulus must be positive"));
        }
        let count = spf.count_progression_primes(t, m)?;
        let unshifted = spf.progression_recip_sum(t, m, false)?;
        let shifted = spf.progression_recip_sum(t, m, true)?;
        let phi_m = if m <= spf.limit() {
            clam::euler_phi(&spf.factorize(m)?) as f64
        } else {
            return Err(argument(format!("modulus {m} exceeds the table limit")));
        };
        let loglog_t = log_t.ln();
        let expected = loglog_t / phi_m;
        payload["progression"] = json!({
            "m": m,
            "count": count,
            "recip_sum": unshifted,
            "recip_sum_shifted": shifted,
            "shifted_gap": shifted - unshifted,
            "expected_recip_sum": expected,
            "deviation": unshifted - expected,
            "fitted_constant": unshifted * m as f64 / loglog_t,
        });
    }
    print_json(&payload)
}

fn cmd_product_bound(a: u64, b: u64, limit: Option<u64>) -> Result<()> {
    let ab = a
        .checked_mul(b)
        .ok_or_else(|| argument("a*b overflows 64 bits"))?;
    let limit = resolve_limit(limit, ab, None)?;
    let spf = world::load_spf(limit)?;
    let (_, lambda) = world::load_tables(limit, &spf)?;
    let (lhs, rhs) = product_bound_check(a, b, &lambda)?;
    print_json(&json!({
        "a": a,
        "b": b,
        "lambda_ab": lhs,
        "b_times_lambda_a": rhs,
        "bound_holds": lhs <= rhs,
        "equality": lhs == rhs,
    }))
}
