//! `hlc` — sieve windows, singular series, typical-set densities,
//! pretentious-distance scans, exponential-sum moments, all-shifts
//! correlations and the experiment runners, from the command line.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use hlc_core::arith::{mertens_product, ArithTable};
use hlc_core::correlate::{
    build_f1, build_weight, correlate_all_shifts, CorrMode, FSelect, ShiftSystem,
};
use hlc_core::experiments::{
    run_average_hlc, run_parameter_table, run_shifted_primes, ExperimentConfig,
};
use hlc_core::moments::{complex_weights, moment_m2k, MomentMethod};
use hlc_core::pretentious::{m_statistic, mu_on_primes, MGrid};
use hlc_core::singular::{singular_series, ShiftTuple};
use hlc_core::typical::{complement_density, derive_ranges};

#[derive(Parser)]
#[command(
    name = "hlc",
    version,
    about = "Correlation sums of arithmetic functions, singular series, and pretentious distance at desk scale"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve a window and emit n, mu, lambda, vonmangoldt, spf.
    Sieve {
        #[arg(long)]
        start: u64,
        #[arg(long)]
        length: u64,
        /// Output format (csv).
        #[arg(long, default_value = "csv")]
        emit: String,
    },
    /// Evaluate the singular series of a tuple with a certified interval.
    Singular {
        /// Comma-separated tuple, e.g. 0,2.
        #[arg(long)]
        tuple: String,
        /// Truncation point: all primes up to this bound enter the product.
        #[arg(long, default_value_t = 1_000_003)]
        trunc: u64,
        #[arg(long, default_value = "json")]
        emit: String,
    },
    /// Derive the range cascade and measure the complement density.
    TypicalSet {
        #[arg(long)]
        p1: f64,
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        x: u64,
        /// What to report: density (measured + Mertens) or ranges.
        #[arg(long, default_value = "density")]
        report: String,
    },
    /// Grid infimum of the squared pretentious distance to twisted characters.
    Pretentious {
        /// Function on primes: mu or liouville (identical there).
        #[arg(long)]
        f: String,
        #[arg(long)]
        x: u64,
        /// Largest character modulus.
        #[arg(long = "Q")]
        q: u64,
        /// t range bound, or "auto" for log X.
        #[arg(long, default_value = "auto")]
        tmax: String,
        /// t step, or "auto" for 0.05/log X.
        #[arg(long, default_value = "auto")]
        tstep: String,
        #[arg(long, default_value = "json")]
        emit: String,
    },
    /// Even moments of the short exponential sums of a shifted weight.
    Moments {
        #[arg(long)]
        x: u64,
        /// Window length (integer).
        #[arg(long = "h")]
        h: u64,
        #[arg(long)]
        k: u32,
        /// Weight factors: a=SHIFT for a Lambda factor, mu@SHIFT or
        /// liouville@SHIFT for a multiplicative factor; comma-separated.
        #[arg(long, default_value = "a=0")]
        shifts: String,
        /// counting | convolution | quadrature.
        #[arg(long, default_value = "convolution")]
        method: String,
        #[arg(long, default_value = "csv")]
        emit: String,
    },
    /// S(h) = sum f(n+h) g(n) for all h up to H.
    Correlate {
        #[arg(long)]
        x: u64,
        #[arg(long = "H")]
        h_max: u64,
        /// Varying factor: mu, liouville, abs-mu or one.
        #[arg(long)]
        f: String,
        /// Fixed factors of g, e.g. "mu@+1,Lambda@0".
        #[arg(long, default_value = "Lambda@0")]
        g: String,
        /// fft | direct | auto.
        #[arg(long, default_value = "auto")]
        mode: String,
        #[arg(long, default_value = "csv")]
        emit: String,
    },
    /// Config-driven experiment runners.
    Experiment {
        #[command(subcommand)]
        which: ExperimentCommand,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Averaged correlation statistic A with exceptional-shift counts.
    HlcAverage {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Möbius over shifted primes, normalized by pi(X).
    ShiftedPrimes {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pure-arithmetic parameter table over the configured grid.
    Params {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Fixed multiplicative factors (selector, shift) and Lambda shifts.
type FactorSpec = (Vec<(FSelect, i64)>, Vec<i64>);

fn parse_selector(name: &str) -> Result<FSelect> {
    Ok(match name {
        "mu" => FSelect::Mu,
        "liouville" | "lambda" => FSelect::Liouville,
        "abs-mu" | "mu-abs" => FSelect::MuAbs,
        "one" => FSelect::One,
        other => bail!("unknown function selector {other:?} (expected mu, liouville, abs-mu, one)"),
    })
}

/// Parses fixed-factor specs like "mu@+1,Lambda@0" into (fixed_f, fixed_a).
fn parse_g_spec(spec: &str) -> Result<FactorSpec> {
    let mut fixed_f = Vec::new();
    let mut fixed_a = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, shift) = part
            .split_once('@')
            .with_context(|| format!("factor {part:?} is not name@shift"))?;
        let shift: i64 = shift
            .trim_start_matches('+')
            .parse()
            .with_context(|| format!("bad shift in {part:?}"))?;
        match name.trim() {
            "Lambda" | "lambda-vm" | "vonmangoldt" => fixed_a.push(shift),
            other => fixed_f.push((parse_selector(other)?, shift)),
        }
    }
    Ok((fixed_f, fixed_a))
}

/// Parses moment-weight specs like "a=0,mu@1".
fn parse_shift_spec(spec: &str) -> Result<FactorSpec> {
    let mut fixed_f = Vec::new();
    let mut fixed_a = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some(v) = part.strip_prefix("a=") {
            fixed_a.push(v.parse().with_context(|| format!("bad shift {part:?}"))?);
        } else {
            let (name, shift) = part
                .split_once('@')
                .with_context(|| format!("factor {part:?} is neither a=N nor name@shift"))?;
            fixed_f.push((
                parse_selector(name.trim())?,
                shift.parse().with_context(|| format!("bad shift {part:?}"))?,
            ));
        }
    }
    Ok((fixed_f, fixed_a))
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Sieve { start, length, emit } => {
            expect_format(&emit, "csv")?;
            let t = ArithTable::sieve_window(start, length)?;
            println!("n,mu,lambda,vonmangoldt,spf");
            for n in start..start + length {
                println!(
                    "{n},{},{},{:.15e},{}",
                    t.mu(n as i64),
                    t.liouville(n as i64),
                    t.von_mangoldt(n as i64),
                    t.spf(n)?
                );
            }
        }
        Command::Singular { tuple, trunc, emit } => {
            expect_format(&emit, "json")?;
            let elements: Vec<i64> = tuple
                .split(',')
                .map(|s| s.trim().parse().context("tuple entries must be integers"))
                .collect::<Result<_>>()?;
            let value = singular_series(&ShiftTuple::new(elements)?, trunc)?;
            println!("{}", serde_json::to_string_pretty(&value)?);
        }
        Command::TypicalSet { p1, q1, x, report } => {
            let params = derive_ranges(p1, q1, x)?;
            match report.as_str() {
                "ranges" => println!("{}", serde_json::to_string_pretty(&params)?),
                "density" => {
                    let density = complement_density(&params, x)?;
                    let prediction = mertens_product(
                        params.ranges[0].p_lo,
                        params.ranges[0].q_hi,
                    );
                    let out = serde_json::json!({
                        "params": params,
                        "j": params.j_count(),
                        "measured_complement_density": density,
                        "mertens_prediction_first_range": prediction,
                    });
                    println!("{}", serde_json::to_string_pretty(&out)?);
                }
                other => bail!("unknown report {other:?} (expected density or ranges)"),
            }
        }
        Command::Pretentious {
            f,
            x,
            q,
            tmax,
            tstep,
            emit,
        } => {
            expect_format(&emit, "json")?;
            match f.as_str() {
                "mu" | "liouville" | "lambda" => {}
                other => bail!("unsupported f {other:?} (mu and liouville agree on primes)"),
            }
            let auto = MGrid::auto(x);
            let grid = MGrid {
                t_max: parse_auto(&tmax, auto.t_max)?,
                t_step: parse_auto(&tstep, auto.t_step)?,
            };
            let m = m_statistic(mu_on_primes, x, q, grid)?;
            let out = serde_json::json!({
                "statistic": m,
                "note": "grid infimum (upper estimate of the true infimum over |t| <= X)",
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Moments {
            x,
            h,
            k,
            shifts,
            method,
            emit,
        } => {
            expect_format(&emit, "csv")?;
            let method = match method.as_str() {
                "counting" => MomentMethod::Counting,
                "convolution" => MomentMethod::Convolution,
                "quadrature" => MomentMethod::Quadrature,
                other => bail!("unknown method {other:?}"),
            };
            let (fixed_f, fixed_a) = parse_shift_spec(&shifts)?;
            let sys = ShiftSystem {
                f1: FSelect::One,
                fixed_f,
                fixed_a,
                h_max: 1,
            };
            let max_shift = sys.max_shift() as u64;
            let table = ArithTable::sieve_window(1, x + h + max_shift + 2)?;
            let w = build_weight(&sys, &table, x + h)?;
            let report = moment_m2k(&complex_weights(&w), x, h, k, method)?;
            println!("x,h,k,method,value,normalized");
            println!(
                "{},{},{},{},{:.15e},{:.15e}",
                report.x, report.h, report.k, report.method, report.value, report.normalized
            );
        }
        Command::Correlate {
            x,
            h_max,
            f,
            g,
            mode,
            emit,
        } => {
            expect_format(&emit, "csv")?;
            let mode = match mode.as_str() {
                "fft" => CorrMode::Fft,
                "direct" => CorrMode::Direct,
                "auto" => CorrMode::Auto,
                other => bail!("unknown mode {other:?}"),
            };
            let (fixed_f, fixed_a) = parse_g_spec(&g)?;
            let sys = ShiftSystem {
                f1: parse_selector(&f)?,
                fixed_f,
                fixed_a,
                h_max,
            };
            let reach = x + h_max.max(sys.max_shift() as u64) + 1;
            let table = ArithTable::sieve_window(1, reach)?;
            let fv = build_f1(&sys, &table, x, None)?;
            let gv = build_weight(&sys, &table, x)?;
            let report = correlate_all_shifts(&fv, &gv, x, h_max, mode)?;
            println!(
                "# x={} h_max={} e_g={:.6e} mode={:?} error_bound={:.3e}",
                report.x, report.h_max, report.e_g, report.mode, report.error_bound
            );
            println!("h,s_h");
            for (i, v) in report.s.iter().enumerate() {
                println!("{},{v:.12e}", i + 1);
            }
        }
        Command::Experiment { which } => match which {
            ExperimentCommand::HlcAverage { config, out } => {
                let cfg = load_config(&config, out)?;
                let report = run_average_hlc(&cfg)?;
                println!("{}", serde_json::to_string_pretty(&report)?);
            }
            ExperimentCommand::ShiftedPrimes { config, out } => {
                let cfg = load_config(&config, out)?;
                let report = run_shifted_primes(&cfg)?;
                println!("{}", serde_json::to_string_pretty(&report)?);
            }
            ExperimentCommand::Params { config, out } => {
                let cfg = load_config(&config, out)?;
                let rows = run_parameter_table(&cfg)?;
                println!("{}", serde_json::to_string_pretty(&rows)?);
            }
        },
    }
    Ok(())
}

fn load_config(path: &std::path::Path, out: Option<PathBuf>) -> Result<ExperimentConfig> {
    let mut cfg =
        ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?;
    if let Some(dir) = out {
        cfg.out_dir = dir;
    }
    Ok(cfg)
}

fn parse_auto(value: &str, auto: f64) -> Result<f64> {
    if value == "auto" {
        Ok(auto)
    } else {
        value.parse().context("expected a number or \"auto\"")
    }
}

fn expect_format(emit: &str, supported: &str) -> Result<()> {
    if emit != supported {
        bail!("this subcommand emits {supported}, not {emit:?}");
    }
    Ok(())
}
