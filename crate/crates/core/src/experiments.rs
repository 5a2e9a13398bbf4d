//! Configuration-driven experiment runners: the averaged correlation
//! statistic A = (1/(HX)) Σ_{h≤H} |S(h)| with exceptional-shift counts,
//! the shifted-prime variant normalized by π(X), and the pure-arithmetic
//! parameter table. Summaries are JSON, per-shift data CSV.
//!
//! Asymptotic-regime hypotheses (δ windows, H against powers of log X) fail
//! routinely at desk scale; runs proceed and the violations are carried
//! as explicit flags in every report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use crate::arith::ArithTable;
use crate::correlate::{
    build_f1, build_weight, correlate_all_shifts, CorrMode, FSelect, ShiftSystem,
};
use crate::error::{Error, Result};
use crate::typical::{choose_params, derive_ranges, membership_mask, regime_flags};
use crate::util::KahanSum;

/// The absolute constant of the exceptional-set exponent.
pub const C_EXPONENT: f64 = 1.0 / 10_000.0;

/// Thresholds δ′ for the exceptional-shift counts |{h : |S(h)| > δ′X}|.
pub const EXCEPTIONAL_THRESHOLDS: [f64; 4] = [0.01, 0.02, 0.05, 0.1];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TypicalSetSource {
    Off,
    /// Derive P₁, Q₁ from (H, δ, M-estimate).
    Choose,
    Explicit {
        p1: f64,
        q1: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub x: u64,
    pub h_max: u64,
    /// Name of the varying factor: "mu", "liouville", "abs-mu" or "one".
    pub f1: String,
    /// (selector name, shift) for the fixed factors f_i(n+h_i), i ≥ 2.
    pub fixed_f: Vec<(String, i64)>,
    pub fixed_a: Vec<i64>,
    pub epsilon: f64,
    /// None means auto: δ = 10⁴ (ℓ/ε) (log log H)/log H.
    pub delta: Option<f64>,
    /// None means auto: p = 2 + 2⌈ℓ/ε⌉.
    pub p_exponent: Option<u32>,
    pub typical_set: TypicalSetSource,
    /// Non-pretentiousness estimate consumed by the parameter choice.
    pub m_estimate: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
    /// Grid lists for the parameter table.
    pub x_list: Vec<u64>,
    pub h_list: Vec<u64>,
    pub epsilon_list: Vec<f64>,
    pub ell_list: Vec<u32>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            x: 1_000_000,
            h_max: 100,
            f1: "mu".into(),
            fixed_f: Vec::new(),
            fixed_a: vec![0],
            epsilon: 1.0,
            delta: None,
            p_exponent: None,
            typical_set: TypicalSetSource::Off,
            m_estimate: 1.0,
            seed: 1,
            out_dir: PathBuf::from("reports"),
            x_list: vec![1_000_000, 10_000_000],
            h_list: vec![100, 1000, 1_000_000],
            epsilon_list: vec![1.0],
            ell_list: vec![1, 2],
        }
    }
}

fn parse_list<T: std::str::FromStr>(value: &str, key: &str) -> Result<Vec<T>> {
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<T>()
                .map_err(|_| Error::Config(format!("bad entry {s:?} in {key}")))
        })
        .collect()
}

impl ExperimentConfig {
    /// Parses a plain `key = value` text file; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_str_content(&std::fs::read_to_string(path)?)
    }

    pub fn from_str_content(content: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |msg: &str| Error::Config(format!("line {}: {msg}", lineno + 1));
            match key {
                "x" => cfg.x = value.parse().map_err(|_| bad("bad x"))?,
                "h_max" | "h" => cfg.h_max = value.parse().map_err(|_| bad("bad h_max"))?,
                "f" | "f1" => cfg.f1 = value.to_string(),
                "fixed_f" => {
                    cfg.fixed_f = if value.is_empty() {
                        Vec::new()
                    } else {
                        value
                            .split(',')
                            .map(|part| {
                                let (name, shift) = part
                                    .trim()
                                    .split_once('@')
                                    .ok_or_else(|| bad("fixed_f entries are name@shift"))?;
                                Ok((
                                    name.trim().to_string(),
                                    shift
                                        .trim()
                                        .parse::<i64>()
                                        .map_err(|_| bad("bad shift in fixed_f"))?,
                                ))
                            })
                            .collect::<Result<Vec<_>>>()?
                    }
                }
                "fixed_a" | "a" => cfg.fixed_a = parse_list(value, "fixed_a")?,
                "epsilon" => cfg.epsilon = value.parse().map_err(|_| bad("bad epsilon"))?,
                "delta" => {
                    cfg.delta = if value == "auto" {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad("bad delta"))?)
                    }
                }
                "p" => {
                    cfg.p_exponent = if value == "auto" {
                        None
                    } else {
                        Some(value.parse().map_err(|_| bad("bad p"))?)
                    }
                }
                "typical_set" => {
                    cfg.typical_set = match value {
                        "off" => TypicalSetSource::Off,
                        "choose" => TypicalSetSource::Choose,
                        "explicit" => TypicalSetSource::Explicit { p1: 0.0, q1: 0.0 },
                        _ => return Err(bad("typical_set is off|choose|explicit")),
                    }
                }
                "p1" => {
                    let p1: f64 = value.parse().map_err(|_| bad("bad p1"))?;
                    cfg.typical_set = match cfg.typical_set {
                        TypicalSetSource::Explicit { q1, .. } => {
                            TypicalSetSource::Explicit { p1, q1 }
                        }
                        _ => TypicalSetSource::Explicit { p1, q1: 0.0 },
                    };
                }
                "q1" => {
                    let q1: f64 = value.parse().map_err(|_| bad("bad q1"))?;
                    cfg.typical_set = match cfg.typical_set {
                        TypicalSetSource::Explicit { p1, .. } => {
                            TypicalSetSource::Explicit { p1, q1 }
                        }
                        _ => TypicalSetSource::Explicit { p1: 0.0, q1 },
                    };
                }
                "m_estimate" => cfg.m_estimate = value.parse().map_err(|_| bad("bad m_estimate"))?,
                "seed" => cfg.seed = value.parse().map_err(|_| bad("bad seed"))?,
                "out" | "out_dir" => cfg.out_dir = PathBuf::from(value),
                "x_list" => cfg.x_list = parse_list(value, "x_list")?,
                "h_list" => cfg.h_list = parse_list(value, "h_list")?,
                "epsilon_list" => cfg.epsilon_list = parse_list(value, "epsilon_list")?,
                "ell_list" => cfg.ell_list = parse_list(value, "ell_list")?,
                other => return Err(Error::Config(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn ell(&self) -> u32 {
        self.fixed_a.len() as u32
    }

    /// δ = 10⁴ (ℓ/ε) (log log H)/log H unless pinned.
    pub fn resolved_delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| {
            auto_delta(self.h_max as f64, self.epsilon, self.ell().max(1))
        })
    }

    /// p = 2 + 2⌈ℓ/ε⌉ unless pinned.
    pub fn resolved_p(&self) -> u32 {
        self.p_exponent
            .unwrap_or_else(|| auto_p(self.epsilon, self.ell().max(1)))
    }

    fn selector(name: &str) -> Result<FSelect> {
        match name {
            "mu" => Ok(FSelect::Mu),
            "liouville" | "lambda" => Ok(FSelect::Liouville),
            "abs-mu" | "mu-abs" => Ok(FSelect::MuAbs),
            "one" => Ok(FSelect::One),
            other => Err(Error::Config(format!("unknown function selector {other:?}"))),
        }
    }

    pub fn shift_system(&self) -> Result<ShiftSystem> {
        let fixed_f = self
            .fixed_f
            .iter()
            .map(|(name, shift)| Ok((Self::selector(name)?, *shift)))
            .collect::<Result<Vec<_>>>()?;
        let sys = ShiftSystem {
            f1: Self::selector(&self.f1)?,
            fixed_f,
            fixed_a: self.fixed_a.clone(),
            h_max: self.h_max,
        };
        sys.validate()?;
        Ok(sys)
    }
}

pub fn auto_delta(h: f64, epsilon: f64, ell: u32) -> f64 {
    1e4 * (ell as f64 / epsilon) * h.ln().ln() / h.ln()
}

pub fn auto_p(epsilon: f64, ell: u32) -> u32 {
    2 + 2 * (ell as f64 / epsilon).ceil() as u32
}

/// Hypothesis flags shared by the experiment runners.
fn hypothesis_flags(cfg: &ExperimentConfig, delta: f64) -> Vec<String> {
    let mut flags = regime_flags(cfg.h_max as f64, delta);
    let ell = cfg.ell().max(1) as f64;
    let floor = (cfg.x as f64).ln().powf(ell + cfg.epsilon);
    if (cfg.h_max as f64) < floor {
        flags.push(format!(
            "H = {} below (log X)^(ell+epsilon) = {floor:.2}",
            cfg.h_max
        ));
    }
    if cfg.h_max > cfg.x {
        flags.push("H exceeds X".into());
    }
    flags
}

#[derive(Debug, Clone, Serialize)]
pub struct AverageReport {
    pub config: ExperimentConfig,
    pub resolved_delta: f64,
    pub resolved_p: u32,
    pub flags: Vec<String>,
    /// A = (1/(HX)) Σ_{h≤H} |S(h)|.
    pub a_statistic: f64,
    /// (log log H)/log H, the scale A is compared against.
    pub benchmark: f64,
    /// 1 − c·δε/ℓ with c = 1/10000: the exceptional-set count is expected
    /// to scale like H to this power.
    pub exceptional_exponent: f64,
    pub exceptional_counts: Vec<(f64, u64)>,
    pub mode: CorrMode,
    pub per_h_csv: String,
    pub timings: Vec<(String, f64)>,
    /// Raw S(h) values (h = 1..=H); not serialized.
    #[serde(skip)]
    pub s: Vec<f64>,
}

fn aggregate(s: &[f64], x: u64) -> (f64, Vec<(f64, u64)>) {
    let mut acc = KahanSum::new();
    for v in s {
        acc.add(v.abs());
    }
    let a = acc.value() / (s.len() as f64 * x as f64);
    let counts = EXCEPTIONAL_THRESHOLDS
        .iter()
        .map(|&th| {
            (
                th,
                s.iter().filter(|v| v.abs() > th * x as f64).count() as u64,
            )
        })
        .collect();
    (a, counts)
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> Result<()> {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

/// The averaged-correlation experiment: builds the tables, the optional
/// typical-set mask and the weight g, correlates all shifts at once and
/// aggregates A plus the exceptional counts.
pub fn run_average_hlc(cfg: &ExperimentConfig) -> Result<AverageReport> {
    if cfg.h_max > cfg.x {
        return Err(Error::invalid("H must not exceed X"));
    }
    let sys = cfg.shift_system()?;
    let delta = cfg.resolved_delta();
    let p = cfg.resolved_p();
    let mut flags = hypothesis_flags(cfg, delta);
    let mut timings = Vec::new();

    let t0 = Instant::now();
    let reach = cfg.x + cfg.h_max.max(sys.max_shift() as u64) + 1;
    let table = ArithTable::sieve_window(1, reach)?;
    timings.push(("sieve".to_string(), t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let mask = match &cfg.typical_set {
        TypicalSetSource::Off => None,
        TypicalSetSource::Choose => {
            let params = choose_params(cfg.h_max as f64, cfg.x, delta, cfg.m_estimate)?;
            flags.push(format!(
                "typical set: chosen log P1 = {:.4}, log Q1 = {:.4}, J = {}",
                params.ranges[0].log_p,
                params.ranges[0].log_q,
                params.j_count()
            ));
            Some(membership_mask(&params, cfg.x + cfg.h_max))
        }
        TypicalSetSource::Explicit { p1, q1 } => {
            let params = derive_ranges(*p1, *q1, cfg.x)?;
            Some(membership_mask(&params, cfg.x + cfg.h_max))
        }
    };
    let f1 = build_f1(&sys, &table, cfg.x, mask.as_deref())?;
    let g = build_weight(&sys, &table, cfg.x)?;
    timings.push(("weights".to_string(), t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let report = correlate_all_shifts(&f1, &g, cfg.x, cfg.h_max, CorrMode::Auto)?;
    timings.push(("correlate".to_string(), t0.elapsed().as_secs_f64()));

    let (a_statistic, exceptional_counts) = aggregate(&report.s, cfg.x);
    let benchmark = (cfg.h_max as f64).ln().ln() / (cfg.h_max as f64).ln();
    let exceptional_exponent =
        1.0 - C_EXPONENT * delta * cfg.epsilon / cfg.ell().max(1) as f64;

    std::fs::create_dir_all(&cfg.out_dir)?;
    let csv_path = cfg.out_dir.join("hlc_average_per_h.csv");
    write_csv(
        &csv_path,
        "h,s_h",
        report
            .s
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{},{v:.12e}", i + 1)),
    )?;

    let out = AverageReport {
        config: cfg.clone(),
        resolved_delta: delta,
        resolved_p: p,
        flags,
        a_statistic,
        benchmark,
        exceptional_exponent,
        exceptional_counts,
        mode: report.mode,
        per_h_csv: csv_path.display().to_string(),
        timings,
        s: report.s,
    };
    std::fs::write(
        cfg.out_dir.join("hlc_average_summary.json"),
        serde_json::to_string_pretty(&out).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ShiftedPrimesReport {
    pub config: ExperimentConfig,
    pub flags: Vec<String>,
    pub prime_count: u64,
    /// fraction of h ≤ H with |Σ_{p≤X} μ(p+h)| > 0.5 π(X).
    pub large_fraction: f64,
    /// mean over h of |Σ_{p≤X} μ(p+h)| / π(X).
    pub mean_normalized: f64,
    /// A-statistic of the Λ-weighted form, for comparison.
    pub a_statistic_lambda: f64,
    pub per_h_csv: String,
    pub timings: Vec<(String, f64)>,
    #[serde(skip)]
    pub s_prime: Vec<f64>,
    #[serde(skip)]
    pub s_lambda: Vec<f64>,
}

/// Per-shift sums Σ_{p≤X} μ(p+h), emitted both in the prime-indicator
/// form (stated) and the Λ-weighted form (native to the machinery).
pub fn run_shifted_primes(cfg: &ExperimentConfig) -> Result<ShiftedPrimesReport> {
    if cfg.fixed_a != vec![0] || !cfg.fixed_f.is_empty() {
        return Err(Error::invalid(
            "shifted-primes runs the k = 1, ell = 1, a1 = 0 system",
        ));
    }
    let sys = cfg.shift_system()?;
    let delta = cfg.resolved_delta();
    let flags = hypothesis_flags(cfg, delta);
    let mut timings = Vec::new();

    let t0 = Instant::now();
    let table = ArithTable::sieve_window(1, cfg.x + cfg.h_max + 1)?;
    timings.push(("sieve".to_string(), t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let f1 = build_f1(&sys, &table, cfg.x, None)?;
    let g_lambda = build_weight(&sys, &table, cfg.x)?;
    let mut g_prime = vec![0.0f64; cfg.x as usize + 1];
    let mut prime_count = 0u64;
    for n in 2..=cfg.x {
        if table.is_prime(n)? {
            g_prime[n as usize] = 1.0;
            prime_count += 1;
        }
    }
    timings.push(("weights".to_string(), t0.elapsed().as_secs_f64()));

    let t0 = Instant::now();
    let rep_l = correlate_all_shifts(&f1, &g_lambda, cfg.x, cfg.h_max, CorrMode::Auto)?;
    let rep_p = correlate_all_shifts(&f1, &g_prime, cfg.x, cfg.h_max, CorrMode::Auto)?;
    timings.push(("correlate".to_string(), t0.elapsed().as_secs_f64()));

    let pi_x = prime_count as f64;
    let large = rep_p.s.iter().filter(|v| v.abs() > 0.5 * pi_x).count() as f64
        / cfg.h_max as f64;
    let mut mean = KahanSum::new();
    for v in &rep_p.s {
        mean.add(v.abs() / pi_x);
    }
    let (a_lambda, _) = aggregate(&rep_l.s, cfg.x);

    std::fs::create_dir_all(&cfg.out_dir)?;
    let csv_path = cfg.out_dir.join("shifted_primes_per_h.csv");
    write_csv(
        &csv_path,
        "h,s_prime_indicator,s_lambda",
        (0..cfg.h_max as usize)
            .map(|i| format!("{},{:.12e},{:.12e}", i + 1, rep_p.s[i], rep_l.s[i])),
    )?;

    let out = ShiftedPrimesReport {
        config: cfg.clone(),
        flags,
        prime_count,
        large_fraction: large,
        mean_normalized: mean.value() / cfg.h_max as f64,
        a_statistic_lambda: a_lambda,
        per_h_csv: csv_path.display().to_string(),
        timings,
        s_prime: rep_p.s,
        s_lambda: rep_l.s,
    };
    std::fs::write(
        cfg.out_dir.join("shifted_primes_summary.json"),
        serde_json::to_string_pretty(&out).map_err(|e| Error::Config(e.to_string()))?,
    )?;
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ParamRow {
    pub x: u64,
    pub h: u64,
    pub epsilon: f64,
    pub ell: u32,
    pub delta: f64,
    pub p: u32,
    pub log_w: f64,
    pub log_p1: f64,
    pub log_q1: f64,
    pub j: usize,
    /// Q = min{(log X)^{1/125}, (log H)⁵}.
    pub q_cap: f64,
    pub flags: Vec<String>,
}

/// Pure arithmetic: δ(H, ε, ℓ), p(ε, ℓ), W, P₁, Q₁, J and the character
/// cutoff Q over the configured (X, H, ε, ℓ) grid. No sieving.
pub fn run_parameter_table(cfg: &ExperimentConfig) -> Result<Vec<ParamRow>> {
    let mut rows = Vec::new();
    for &x in &cfg.x_list {
        for &h in &cfg.h_list {
            for &epsilon in &cfg.epsilon_list {
                for &ell in &cfg.ell_list {
                    let delta = auto_delta(h as f64, epsilon, ell);
                    let p = auto_p(epsilon, ell);
                    let log_h = (h as f64).ln();
                    let log_w = if 6.0 * log_h.ln() <= cfg.m_estimate / 300.0 {
                        (6.0 * delta * log_h).min(cfg.m_estimate / 300.0)
                    } else {
                        cfg.m_estimate / 300.0
                    };
                    let log_p1 = 200.0 * log_w;
                    let log_q1 = log_h - 3.0 * log_w;
                    let mut flags = regime_flags(h as f64, delta);
                    let j = match derive_ranges(log_p1.exp(), log_q1.exp(), x) {
                        Ok(params) => params.j_count(),
                        Err(e) => {
                            flags.push(format!("cascade rejected: {e}"));
                            0
                        }
                    };
                    let q_cap = (x as f64)
                        .ln()
                        .powf(1.0 / 125.0)
                        .min((h as f64).ln().powi(5));
                    rows.push(ParamRow {
                        x,
                        h,
                        epsilon,
                        ell,
                        delta,
                        p,
                        log_w,
                        log_p1,
                        log_q1,
                        j,
                        q_cap,
                        flags,
                    });
                }
            }
        }
    }
    std::fs::create_dir_all(&cfg.out_dir)?;
    let mut csv = String::from("x,h,epsilon,ell,delta,p,log_w,log_p1,log_q1,j,q_cap,flags\n");
    for r in &rows {
        writeln!(
            csv,
            "{},{},{},{},{:.6},{},{:.6},{:.6},{:.6},{},{:.6},{}",
            r.x,
            r.h,
            r.epsilon,
            r.ell,
            r.delta,
            r.p,
            r.log_w,
            r.log_p1,
            r.log_q1,
            r.j,
            r.q_cap,
            r.flags.join("; ")
        )
        .expect("string write");
    }
    std::fs::write(cfg.out_dir.join("parameter_table.csv"), csv)?;
    Ok(rows)
}
