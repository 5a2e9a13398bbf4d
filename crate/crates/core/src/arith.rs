//! Segmented sieving of μ(n), λ(n), Λ(n), Ω(n) and smallest prime factors
//! over arbitrary windows. This is the data substrate for every other
//! module: correlation weights, typical-set membership and prime counts
//! all read from an [`ArithTable`].

use crate::error::{Error, Result};
use crate::util::KahanSum;

/// Hard cap on the number of entries a single window may hold (~1.8 GB of
/// table data at 18 bytes per entry).
pub const MAX_WINDOW_LEN: u64 = 100_000_000;

/// A contiguous window of precomputed arithmetic-function values.
///
/// For `n` in `[start, start+len)` the table stores μ(n), λ(n) = (−1)^Ω(n),
/// Λ(n) (natural logs, 0 off prime powers) and the smallest prime factor
/// (spf(1) = 1). All functions read as 0 for nonpositive or out-of-window
/// arguments, matching the convention that extends them by zero.
pub struct ArithTable {
    start: u64,
    mu: Vec<i8>,
    liouville: Vec<i8>,
    von_mangoldt: Vec<f64>,
    spf: Vec<u64>,
}

impl ArithTable {
    /// Sieve the window `[start, start+length)`.
    ///
    /// Runs a segmented factor sieve: base primes up to √(start+length) are
    /// divided out of every window entry, the leftover cofactor (a prime
    /// larger than the square root, if any) is accounted last. Memory is
    /// O(length + √(start+length)).
    pub fn sieve_window(start: u64, length: u64) -> Result<Self> {
        if start < 1 || length < 1 {
            return Err(Error::invalid("sieve_window requires start ≥ 1, length ≥ 1"));
        }
        if length > MAX_WINDOW_LEN {
            return Err(Error::Capacity {
                requested: length,
                budget: MAX_WINDOW_LEN,
            });
        }
        let end = start
            .checked_add(length)
            .ok_or_else(|| Error::invalid("start + length overflows"))?;
        let len = length as usize;

        let mut remaining: Vec<u64> = (start..end).collect();
        let mut mu = vec![1i8; len];
        let mut big_omega = vec![0u8; len];
        let mut distinct = vec![0u8; len];
        let mut spf = vec![0u64; len];

        let sqrt_end = (end as f64).sqrt() as u64 + 1;
        let base = primes_up_to(sqrt_end);
        for &p in &base {
            if p >= end {
                break;
            }
            let first = if start.is_multiple_of(p) {
                start
            } else {
                start + (p - start % p)
            };
            let mut m = first.max(p);
            while m < end {
                let i = (m - start) as usize;
                let mut e = 0u8;
                while remaining[i].is_multiple_of(p) {
                    remaining[i] /= p;
                    e += 1;
                }
                // e can be 0 when an earlier window pass already divided p out;
                // with distinct base primes that never happens, so e ≥ 1 here.
                if spf[i] == 0 {
                    spf[i] = p;
                }
                big_omega[i] += e;
                distinct[i] += 1;
                mu[i] = if e >= 2 { 0 } else { -mu[i] };
                m += p;
            }
        }
        // Leftover cofactors are primes above the square root, to the first power.
        for i in 0..len {
            let r = remaining[i];
            if r > 1 {
                if spf[i] == 0 {
                    spf[i] = r;
                }
                big_omega[i] += 1;
                distinct[i] += 1;
                mu[i] = -mu[i];
            }
        }

        let mut liouville = vec![1i8; len];
        let mut von_mangoldt = vec![0.0f64; len];
        for i in 0..len {
            let n = start + i as u64;
            if n == 1 {
                spf[i] = 1;
                mu[i] = 1;
                liouville[i] = 1;
                continue;
            }
            liouville[i] = if big_omega[i].is_multiple_of(2) { 1 } else { -1 };
            if distinct[i] == 1 {
                von_mangoldt[i] = (spf[i] as f64).ln();
            }
        }

        Ok(Self {
            start,
            mu,
            liouville,
            von_mangoldt,
            spf,
        })
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    /// One past the last covered integer.
    pub fn end(&self) -> u64 {
        self.start + self.mu.len() as u64
    }

    pub fn len(&self) -> u64 {
        self.mu.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    #[inline]
    fn idx(&self, n: i64) -> Option<usize> {
        if n < 1 {
            return None;
        }
        let n = n as u64;
        if n < self.start || n >= self.end() {
            None
        } else {
            Some((n - self.start) as usize)
        }
    }

    /// μ(n); 0 for nonpositive or out-of-window arguments.
    #[inline]
    pub fn mu(&self, n: i64) -> i64 {
        self.idx(n).map_or(0, |i| self.mu[i] as i64)
    }

    /// λ(n) = (−1)^Ω(n); 0 outside the window.
    #[inline]
    pub fn liouville(&self, n: i64) -> i64 {
        self.idx(n).map_or(0, |i| self.liouville[i] as i64)
    }

    /// Λ(n); 0 outside the window.
    #[inline]
    pub fn von_mangoldt(&self, n: i64) -> f64 {
        self.idx(n).map_or(0.0, |i| self.von_mangoldt[i])
    }

    /// Smallest prime factor. Unlike the function values, spf has no zero
    /// extension, so out-of-window lookups are errors.
    pub fn spf(&self, n: u64) -> Result<u64> {
        self.idx(n as i64)
            .map(|i| self.spf[i])
            .ok_or(Error::OutOfWindow {
                n,
                start: self.start,
                end: self.end(),
            })
    }

    pub fn is_prime(&self, n: u64) -> Result<bool> {
        Ok(n >= 2 && self.spf(n)? == n)
    }

    /// Full factorization by iterated smallest-prime-factor extraction.
    ///
    /// Every intermediate quotient must itself lie in the window, which
    /// holds whenever the window starts at 1; otherwise an out-of-window
    /// error is returned.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>> {
        let mut out = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf(m)?;
            let mut e = 0u32;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            out.push((p, e));
        }
        Ok(out)
    }

    /// Checks that the window covers `[need_start, need_end)`.
    pub fn require_coverage(&self, need_start: u64, need_end: u64) -> Result<()> {
        if self.start <= need_start && self.end() >= need_end {
            Ok(())
        } else {
            Err(Error::Coverage {
                have_start: self.start,
                have_end: self.end(),
                need_start,
                need_end,
            })
        }
    }
}

/// All primes ≤ `limit` by a bit-packed odd sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    if limit < 3 {
        return vec![2];
    }
    let n = limit as usize;
    // odd composites only: bit i represents 2i+3
    let m = (n.saturating_sub(3)) / 2 + 1;
    let mut composite = vec![false; m];
    let mut primes = vec![2u64];
    let mut i = 0usize;
    while (2 * i + 3) * (2 * i + 3) <= n {
        if !composite[i] {
            let p = 2 * i + 3;
            let mut j = (p * p - 3) / 2;
            while j < m {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    for (i, &c) in composite.iter().enumerate() {
        if !c {
            primes.push((2 * i + 3) as u64);
        }
    }
    primes
}

/// Visits every prime in `[lo, hi]` in increasing order, sieving by
/// segments so memory stays O(√hi + segment).
pub fn for_primes_in_range(lo: u64, hi: u64, mut visit: impl FnMut(u64)) {
    if hi < 2 || hi < lo {
        return;
    }
    let lo = lo.max(2);
    let base = primes_up_to((hi as f64).sqrt() as u64 + 1);
    const SEG: u64 = 1 << 20;
    let mut seg_lo = lo;
    while seg_lo <= hi {
        let seg_hi = (seg_lo + SEG - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        let mut comp = vec![false; len];
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut m = (seg_lo.div_ceil(p) * p).max(p * p);
            while m <= seg_hi {
                comp[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        for (i, &c) in comp.iter().enumerate() {
            let n = seg_lo + i as u64;
            if !c && n >= 2 {
                visit(n);
            }
        }
        if seg_hi == u64::MAX {
            break;
        }
        seg_lo = seg_hi + 1;
    }
}

/// Exact count of primes ≤ `x`.
pub fn prime_pi(x: u64) -> u64 {
    let mut count = 0u64;
    for_primes_in_range(2, x, |_| count += 1);
    count
}

/// ∏_{p ∈ [lo, hi]} (1 − 1/p), the Mertens product over a prime range,
/// computed in log space with compensated summation.
pub fn mertens_product(lo: u64, hi: u64) -> f64 {
    let mut log_sum = KahanSum::new();
    for_primes_in_range(lo, hi, |p| {
        log_sum.add((-1.0 / p as f64).ln_1p());
    });
    log_sum.value().exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent per-n trial-division oracle for μ, λ, Λ, spf.
    fn oracle(n: u64) -> (i64, i64, f64, u64) {
        assert!(n >= 1);
        if n == 1 {
            return (1, 1, 0.0, 1);
        }
        let f = crate::util::factor_u64(n);
        let omega_total: u32 = f.iter().map(|&(_, e)| e).sum();
        let mu = if f.iter().any(|&(_, e)| e >= 2) {
            0
        } else if f.len().is_multiple_of(2) {
            1
        } else {
            -1
        };
        let lam = if omega_total.is_multiple_of(2) { 1 } else { -1 };
        let vm = if f.len() == 1 { (f[0].0 as f64).ln() } else { 0.0 };
        (mu, lam, vm, f[0].0)
    }

    #[test]
    fn window_from_one_matches_direct_factorization() {
        let t = ArithTable::sieve_window(1, 31).unwrap();
        assert_eq!(t.mu(1), 1);
        assert_eq!(t.mu(12), 0);
        assert_eq!(t.mu(30), -1);
        assert!((t.von_mangoldt(9) - 3f64.ln()).abs() < 1e-15);
        assert_eq!(t.von_mangoldt(10), 0.0);
        assert_eq!(t.liouville(12), -1); // 12 = 2²·3, Ω = 3
        for n in 1..31u64 {
            let (mu, lam, vm, spf) = oracle(n);
            assert_eq!(t.mu(n as i64), mu, "mu({n})");
            assert_eq!(t.liouville(n as i64), lam, "lambda({n})");
            assert!((t.von_mangoldt(n as i64) - vm).abs() <= 1e-14 * vm.abs().max(1.0));
            assert_eq!(t.spf(n).unwrap(), spf, "spf({n})");
        }
    }

    #[test]
    fn high_window_matches_oracle() {
        let start = 999_983;
        let t = ArithTable::sieve_window(start, 500).unwrap();
        for n in start..start + 500 {
            let (mu, lam, vm, spf) = oracle(n);
            assert_eq!(t.mu(n as i64), mu, "mu({n})");
            assert_eq!(t.liouville(n as i64), lam, "lambda({n})");
            assert!((t.von_mangoldt(n as i64) - vm).abs() <= 1e-13 * vm.abs().max(1.0));
            assert_eq!(t.spf(n).unwrap(), spf, "spf({n})");
        }
    }

    #[test]
    fn zero_extension_and_errors() {
        let t = ArithTable::sieve_window(10, 10).unwrap();
        assert_eq!(t.mu(-5), 0);
        assert_eq!(t.mu(0), 0);
        assert_eq!(t.mu(9), 0);
        assert_eq!(t.mu(20), 0);
        assert_eq!(t.liouville(3), 0);
        assert_eq!(t.von_mangoldt(25), 0.0);
        assert!(t.spf(9).is_err());
        assert!(ArithTable::sieve_window(1, MAX_WINDOW_LEN + 1).is_err());
        assert!(ArithTable::sieve_window(0, 5).is_err());
    }

    #[test]
    fn mu_times_lambda_detects_squarefree() {
        let t = ArithTable::sieve_window(1, 5000).unwrap();
        for n in 1..=5000i64 {
            let prod = t.mu(n) * t.liouville(n);
            assert!(prod == 0 || prod == 1);
            let squarefree = t.mu(n) != 0;
            assert_eq!(prod == 1, squarefree, "n = {n}");
        }
    }

    #[test]
    fn mertens_partial_sum_at_1e6() {
        // Frozen from the naive per-n trial-division oracle
        // (`mertens_oracle_trial_division`, run once at full scale).
        let t = ArithTable::sieve_window(1, 1_000_000).unwrap();
        let m: i64 = (1..=1_000_000i64).map(|n| t.mu(n)).sum();
        assert_eq!(m, 212);
    }

    #[test]
    fn mertens_oracle_trial_division_small() {
        // Live dual-route check at reduced scale; the 1e6 value above was
        // frozen from the same oracle run at full scale.
        let t = ArithTable::sieve_window(1, 20_000).unwrap();
        let sieved: i64 = (1..=20_000i64).map(|n| t.mu(n)).sum();
        let direct: i64 = (1..=20_000u64).map(|n| oracle(n).0).sum();
        assert_eq!(sieved, direct);
    }

    #[test]
    #[ignore = "full-scale oracle; rerun to re-derive the frozen 212"]
    fn mertens_oracle_trial_division_full() {
        let direct: i64 = (1..=1_000_000u64).map(|n| oracle(n).0).sum();
        assert_eq!(direct, 212);
    }

    #[test]
    fn prime_pi_known_values() {
        assert_eq!(prime_pi(2), 1);
        assert_eq!(prime_pi(10), 4);
        assert_eq!(prime_pi(1000), 168);
        assert_eq!(prime_pi(1_000_000), 78_498);
    }

    #[test]
    fn prime_pi_oracle_trial_division() {
        let direct = (2..=50_000u64).filter(|&n| crate::util::is_prime_u64(n)).count() as u64;
        assert_eq!(prime_pi(50_000), direct);
    }

    #[test]
    fn window_consistency_on_overlap() {
        let a = ArithTable::sieve_window(100, 1000).unwrap();
        let b = ArithTable::sieve_window(600, 2000).unwrap();
        for n in 600..1100i64 {
            assert_eq!(a.mu(n), b.mu(n));
            assert_eq!(a.liouville(n), b.liouville(n));
            assert_eq!(a.von_mangoldt(n), b.von_mangoldt(n));
            assert_eq!(a.spf(n as u64).unwrap(), b.spf(n as u64).unwrap());
        }
    }

    #[test]
    fn chebyshev_psi_within_twenty_percent() {
        let x_max = 10_000_000u64;
        let t = ArithTable::sieve_window(1, x_max).unwrap();
        let mut psi = KahanSum::new();
        for n in 1..=x_max {
            psi.add(t.von_mangoldt(n as i64));
            if n >= 10_000 {
                let err = (psi.value() - n as f64).abs();
                assert!(
                    err <= 0.2 * n as f64,
                    "psi({n}) = {} strays too far",
                    psi.value()
                );
            }
        }
    }

    #[test]
    fn primes_up_to_small_limits() {
        assert_eq!(primes_up_to(0), Vec::<u64>::new());
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(3), vec![2, 3]);
        assert_eq!(primes_up_to(4), vec![2, 3]);
        assert_eq!(primes_up_to(5), vec![2, 3, 5]);
    }

    #[test]
    fn segmented_prime_range_visits() {
        let mut v = Vec::new();
        for_primes_in_range(90, 130, |p| v.push(p));
        assert_eq!(v, vec![97, 101, 103, 107, 109, 113, 127]);
        let mut w = Vec::new();
        for_primes_in_range(2, 30, |p| w.push(p));
        assert_eq!(w, primes_up_to(30));
    }

    #[test]
    fn mertens_product_against_direct() {
        let direct: f64 = primes_up_to(10_000)
            .into_iter()
            .filter(|&p| p >= 100)
            .map(|p| 1.0 - 1.0 / p as f64)
            .product();
        let viaproduct = mertens_product(100, 10_000);
        assert!((direct - viaproduct).abs() < 1e-12);
    }
}
