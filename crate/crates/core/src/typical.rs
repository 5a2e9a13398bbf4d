//! The set of integers having a prime factor in each of a cascade of
//! ranges [P_j, Q_j]: derived range cascades, membership tests,
//! complement densities, and the W-based choice of P₁, Q₁ from a target
//! density and a non-pretentiousness estimate.
//!
//! All cascade parameters are kept in log space; the range formulas
//! explode doubly exponentially and only log comparisons are ever needed.

use rayon::prelude::*;

use crate::arith::{for_primes_in_range, ArithTable};
use crate::error::{Error, Result};

/// One range [P_j, Q_j] of the cascade, stored both in log space and as
/// the integer prime bounds actually scanned (Q clamped to X).
#[derive(Debug, Clone, serde::Serialize)]
pub struct FactorRange {
    pub log_p: f64,
    pub log_q: f64,
    /// Smallest integer ≥ P_j.
    pub p_lo: u64,
    /// Largest integer ≤ min(Q_j, X).
    pub q_hi: u64,
}

/// The cascade (P_j, Q_j), j ≤ J, defining the set of integers with a
/// prime factor in every range.
#[derive(Debug, Clone, serde::Serialize)]
pub struct TypicalSetParams {
    pub p1: f64,
    pub q1: f64,
    pub x: u64,
    pub ranges: Vec<FactorRange>,
}

impl TypicalSetParams {
    pub fn j_count(&self) -> usize {
        self.ranges.len()
    }

    /// Direct constructor from explicit integer ranges, for callers that
    /// bypass the cascade formulas (tests, single-range scans).
    pub fn from_single_range(p_lo: u64, q_hi: u64, x: u64) -> Self {
        Self {
            p1: p_lo as f64,
            q1: q_hi as f64,
            x,
            ranges: vec![FactorRange {
                log_p: (p_lo as f64).ln(),
                log_q: (q_hi as f64).ln(),
                p_lo,
                q_hi: q_hi.min(x),
            }],
        }
    }
}

/// Builds the cascade from (P₁, Q₁, X).
///
/// Range 1 is (P₁, Q₁) itself. For j > 1,
/// log P_j = j^{4j} (log Q₁)^{j−1} log P₁ and log Q_j = j^{4j+2} (log Q₁)^j,
/// and ranges are kept while log Q_j ≤ √(½ log X). The first range is
/// always retained: at desk scale the depth bound √(½ log X) routinely
/// sits below Q₁ itself, and dropping range 1 would leave nothing to
/// sieve, so the depth condition only governs how far the cascade extends.
pub fn derive_ranges(p1: f64, q1: f64, x: u64) -> Result<TypicalSetParams> {
    // the negated comparisons also reject NaN parameters
    if !p1.is_finite() || !q1.is_finite() || p1 <= 10.0 || q1 <= p1 || q1 > x as f64 {
        return Err(Error::invalid(format!(
            "need 10 < P1 < Q1 ≤ X, got P1 = {p1}, Q1 = {q1}, X = {x}"
        )));
    }
    let log_p1 = p1.ln();
    let log_q1 = q1.ln();
    let depth_bound = (0.5 * (x as f64).ln()).sqrt();

    let mut ranges = vec![make_range(log_p1, log_q1, p1, q1, x)];
    let mut j = 2u32;
    loop {
        let jf = j as f64;
        let log_pj = jf.powf(4.0 * jf) * log_q1.powi(j as i32 - 1) * log_p1;
        let log_qj = jf.powf(4.0 * jf + 2.0) * log_q1.powi(j as i32);
        if !log_qj.is_finite() || log_qj > depth_bound {
            break;
        }
        ranges.push(make_range(log_pj, log_qj, log_pj.exp(), log_qj.exp(), x));
        j += 1;
    }
    Ok(TypicalSetParams { p1, q1, x, ranges })
}

fn make_range(log_p: f64, log_q: f64, p: f64, q: f64, x: u64) -> FactorRange {
    let q_clamped = q.min(x as f64);
    FactorRange {
        log_p,
        log_q,
        p_lo: p.ceil() as u64,
        q_hi: q_clamped.floor() as u64,
    }
}

/// True iff `n` has a prime factor in [P_j, min(Q_j, X)] for every j ≤ J.
///
/// Factors `n` by iterated smallest-prime-factor extraction from the
/// table, so every intermediate quotient must lie in the table window.
pub fn membership(n: u64, params: &TypicalSetParams, table: &ArithTable) -> Result<bool> {
    let factors = table.factorize(n)?;
    Ok(params
        .ranges
        .iter()
        .all(|r| factors.iter().any(|&(p, _)| p >= r.p_lo && p <= r.q_hi)))
}

/// |𝒮^c ∩ [1, X]| / X by exhaustive scan.
///
/// Windowed: for each range j, all multiples of primes in
/// [P_j, min(Q_j, X)] inside the current window are marked, and an integer
/// is in 𝒮 exactly when all J marks are present. Windows run in parallel;
/// the count is an integer so the reduction order is immaterial.
pub fn complement_density(params: &TypicalSetParams, x: u64) -> Result<f64> {
    if x < 1 {
        return Err(Error::invalid("X must be positive"));
    }
    if params.ranges.is_empty() || params.ranges.len() > 63 {
        return Err(Error::invalid("range count must be in 1..=63"));
    }
    let full: u64 = (1u64 << params.ranges.len()) - 1;
    const WINDOW: u64 = 1 << 21;
    let n_windows = x.div_ceil(WINDOW);
    let miss: u64 = (0..n_windows)
        .into_par_iter()
        .map(|w| {
            let lo = w * WINDOW + 1;
            let hi = ((w + 1) * WINDOW).min(x);
            let len = (hi - lo + 1) as usize;
            let mut mask = vec![0u64; len];
            for (j, r) in params.ranges.iter().enumerate() {
                let bit = 1u64 << j;
                if r.p_lo > r.q_hi {
                    continue; // empty prime range: no integer can satisfy it
                }
                for_primes_in_range(r.p_lo, r.q_hi, |p| {
                    let mut m = lo.div_ceil(p) * p;
                    while m <= hi {
                        mask[(m - lo) as usize] |= bit;
                        m += p;
                    }
                });
            }
            mask.iter().filter(|&&b| b != full).count() as u64
        })
        .sum();
    Ok(miss as f64 / x as f64)
}

/// Per-integer membership indicator over [1, X] (index 0 unused, false).
pub fn membership_mask(params: &TypicalSetParams, x: u64) -> Vec<bool> {
    let full: u64 = (1u64 << params.ranges.len().min(63)) - 1;
    let mut seen = vec![0u64; x as usize + 1];
    for (j, r) in params.ranges.iter().enumerate() {
        let bit = 1u64 << j;
        if r.p_lo > r.q_hi {
            continue;
        }
        for_primes_in_range(r.p_lo, r.q_hi.min(x), |p| {
            let mut m = p;
            while m <= x {
                seen[m as usize] |= bit;
                m += p;
            }
        });
    }
    let mut member = vec![false; x as usize + 1];
    for n in 1..=x as usize {
        member[n] = seen[n] == full;
    }
    member
}

/// The parameter choice feeding the cascade: given H, a density target δ
/// and a non-pretentiousness estimate M, set
/// W = min{H^{6δ}, exp(M/300)} when (log H)⁶ ≤ exp(M/300), and
/// W = exp(M/300) otherwise; then P₁ = W²⁰⁰ and Q₁ = H/W³.
pub fn choose_params(h: f64, x: u64, delta: f64, m_estimate: f64) -> Result<TypicalSetParams> {
    if h < 3.0 {
        return Err(Error::invalid("H must be at least 3"));
    }
    if delta <= 0.0 {
        return Err(Error::invalid("delta must be positive"));
    }
    let log_h = h.ln();
    let log_w = if 6.0 * log_h.ln() <= m_estimate / 300.0 {
        (6.0 * delta * log_h).min(m_estimate / 300.0)
    } else {
        m_estimate / 300.0
    };
    let log_p1 = 200.0 * log_w;
    let log_q1 = log_h - 3.0 * log_w;
    if log_p1 >= log_q1 {
        return Err(Error::invalid(format!(
            "W = exp({log_w:.4}) gives P1 ≥ Q1 (log P1 = {log_p1:.4}, log Q1 = {log_q1:.4})"
        )));
    }
    derive_ranges(log_p1.exp(), log_q1.exp(), x)
}

/// Desk-scale hypothesis flags for the parameter choice; runs proceed
/// regardless, but reports carry these.
pub fn regime_flags(h: f64, delta: f64) -> Vec<String> {
    let mut flags = Vec::new();
    if h >= 3.0 {
        let floor = h.ln().ln() / h.ln();
        if delta < floor {
            flags.push(format!(
                "delta = {delta:.6} below (log log H)/log H = {floor:.6}"
            ));
        }
    }
    if delta > 1.0 / 2000.0 {
        flags.push(format!("delta = {delta:.6} exceeds 1/2000"));
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::mertens_product;

    #[test]
    fn cascade_formulas_by_direct_substitution() {
        // log P₁ = 2, log Q₁ = 3 → log P₂ = 2⁸·3·2 = 1536, log Q₂ = 2¹⁰·9 = 9216.
        let log_p2 = 2.0f64.powi(8) * 3.0 * 2.0;
        let log_q2 = 2.0f64.powi(10) * 9.0;
        assert_eq!(log_p2, 1536.0);
        assert_eq!(log_q2, 9216.0);
        // The j = 2 range survives exactly while √(½ log X) ≥ 9216,
        // i.e. log X ≥ 2·9216²; u64 cannot represent such X, so at any
        // representable X the cascade keeps only j = 1.
        let log_x_boundary = 2.0 * 9216.0f64 * 9216.0;
        assert!(log_q2 <= (0.5 * log_x_boundary).sqrt() + 1e-9);
        // P₁ = e² < 10 fails the 10 < P₁ precondition, so the formula case
        // above cannot be driven through derive_ranges itself.
        assert!(derive_ranges(2.0f64.exp(), 3.0f64.exp(), 1_000_000).is_err());
    }

    #[test]
    fn deep_cascade_appears_for_huge_x() {
        // Small Q₁ keeps log Q₂ = 2¹⁰(log Q₁)² manageable: with
        // log Q₁ ≈ 2.49 we get log Q₂ ≈ 6350, needing log X ≥ 8.1e7 — still
        // unrepresentable, so instead check the j = 2 formulas directly
        // against a tiny synthetic depth bound by calling the internals.
        let params = derive_ranges(11.0, 12.0, u64::MAX).unwrap();
        // depth bound = √(½·ln(2^64)) ≈ 4.7, smaller than log Q₂ ≈ 6350.
        assert_eq!(params.j_count(), 1);
    }

    #[test]
    fn first_range_is_p1_q1() {
        let params = derive_ranges(100.0, 10_000.0, 1_000_000).unwrap();
        assert_eq!(params.ranges[0].p_lo, 100);
        assert_eq!(params.ranges[0].q_hi, 10_000);
        assert_eq!(params.j_count(), 1);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(derive_ranges(5.0, 100.0, 1000).is_err());
        assert!(derive_ranges(50.0, 40.0, 1000).is_err());
        assert!(derive_ranges(50.0, 2000.0, 1000).is_err());
    }

    #[test]
    fn membership_examples() {
        let table = ArithTable::sieve_window(1, 2000).unwrap();
        let params = TypicalSetParams::from_single_range(2, 10, 1000);
        assert!(membership(6, &params, &table).unwrap());

        let params = derive_ranges(11.0, 100.0, 1000).unwrap();
        assert!(!membership(8, &params, &table).unwrap()); // factors {2}

        let params = derive_ranges(20.0, 1000.0, 1_000_000).unwrap();
        assert_eq!(params.j_count(), 1);
        assert!(membership(46, &params, &table).unwrap()); // 46 = 2·23, 23 ∈ [20, 1000]
    }

    #[test]
    fn membership_out_of_window_errors() {
        let table = ArithTable::sieve_window(100, 100).unwrap();
        let params = TypicalSetParams::from_single_range(2, 50, 1000);
        assert!(membership(5000, &params, &table).is_err());
        // quotient escapes the window: 150 = 2·75, 75 < 100
        assert!(membership(150, &params, &table).is_err());
    }

    #[test]
    fn membership_monotone_under_range_deletion() {
        let table = ArithTable::sieve_window(1, 5000).unwrap();
        let two = TypicalSetParams {
            p1: 11.0,
            q1: 500.0,
            x: 5000,
            ranges: vec![
                FactorRange {
                    log_p: 11.0f64.ln(),
                    log_q: 500.0f64.ln(),
                    p_lo: 11,
                    q_hi: 500,
                },
                FactorRange {
                    log_p: 2.0f64.ln(),
                    log_q: 7.0f64.ln(),
                    p_lo: 2,
                    q_hi: 7,
                },
            ],
        };
        let mut one = two.clone();
        one.ranges.pop();
        for n in 1..=4999u64 {
            if membership(n, &two, &table).unwrap() {
                assert!(membership(n, &one, &table).unwrap(), "n = {n}");
            }
        }
    }

    #[test]
    fn density_whole_range_only_misses_one() {
        let params = TypicalSetParams::from_single_range(2, 1000, 1000);
        let d = complement_density(&params, 1000).unwrap();
        assert_eq!(d, 1.0 / 1000.0); // only n = 1 lacks a prime factor
    }

    #[test]
    fn density_matches_mertens_prediction() {
        let params = derive_ranges(100.0, 10_000.0, 1_000_000).unwrap();
        let d = complement_density(&params, 1_000_000).unwrap();
        assert!(d <= 5.0 * 100.0f64.ln() / 10_000.0f64.ln());
        let predicted = mertens_product(100, 10_000);
        assert!(
            d / predicted < 3.0 && predicted / d < 3.0,
            "measured {d}, Mertens {predicted}"
        );
    }

    #[test]
    fn complement_union_bound_exhaustive() {
        // 𝒮^c equals the union of the per-range miss sets (checked at 1e5).
        let x = 100_000u64;
        let table = ArithTable::sieve_window(1, x + 1).unwrap();
        let params = TypicalSetParams {
            p1: 30.0,
            q1: 300.0,
            x,
            ranges: vec![
                FactorRange {
                    log_p: 30.0f64.ln(),
                    log_q: 300.0f64.ln(),
                    p_lo: 30,
                    q_hi: 300,
                },
                FactorRange {
                    log_p: 2.0f64.ln(),
                    log_q: 5.0f64.ln(),
                    p_lo: 2,
                    q_hi: 5,
                },
            ],
        };
        let member = membership_mask(&params, x);
        let mut miss_count = 0u64;
        for n in 1..=x {
            let in_set = membership(n, &params, &table).unwrap();
            assert_eq!(member[n as usize], in_set, "n = {n}");
            let factors = table.factorize(n).unwrap();
            let per_range_miss = params
                .ranges
                .iter()
                .any(|r| !factors.iter().any(|&(p, _)| p >= r.p_lo && p <= r.q_hi));
            assert_eq!(per_range_miss, !in_set, "n = {n}");
            if !in_set {
                miss_count += 1;
            }
        }
        let d = complement_density(&params, x).unwrap();
        assert_eq!(d, miss_count as f64 / x as f64);
    }

    #[test]
    fn choose_params_first_branch_ratio() {
        // Huge M forces W = H^{6δ}; then log P₁/log Q₁ = 1200δ/(1−18δ).
        let h = 1e6;
        let delta = 1.0 / 2000.0;
        let params = choose_params(h, u64::MAX, delta, 1e9).unwrap();
        let ratio = params.ranges[0].log_p / params.ranges[0].log_q;
        let expected = 1200.0 * delta / (1.0 - 18.0 * delta);
        assert!((ratio - expected).abs() < 1e-9, "ratio {ratio} vs {expected}");
    }

    #[test]
    fn choose_params_degenerate_m_rejected() {
        // M = 0 gives W = 1, P₁ = 1 < 10.
        assert!(choose_params(1e6, 1_000_000, 1.0 / 2000.0, 0.0).is_err());
    }

    #[test]
    fn choose_params_branch_boundary() {
        // At exp(M/300) = (log H)⁶ the two branch formulas coincide as long
        // as δ respects its floor (log log H)/log H.
        let h = 1e4f64;
        let m = 300.0 * 6.0 * h.ln().ln();
        let delta = 0.25; // ≥ loglog(1e4)/log(1e4) ≈ 0.2411
        let branch1 = (6.0 * delta * h.ln()).min(m / 300.0);
        let branch2 = m / 300.0;
        assert!((branch1 - branch2).abs() < 1e-9);
        // The resulting W is so large that Q₁ = H/W³ < P₁; the structural
        // rejection still applies.
        assert!(choose_params(h, u64::MAX, delta, m).is_err());
    }

    #[test]
    fn regime_flags_fire_at_desk_scale() {
        let flags = regime_flags(1e4, 0.002);
        assert_eq!(flags.len(), 2); // below the floor and above 1/2000
        assert_eq!(regime_flags(1e6, 2.7e-1).len(), 1);
    }
}
