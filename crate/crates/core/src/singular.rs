//! The Hardy–Littlewood singular series 𝔖(ℋ) with certified truncation
//! error, its trivial upper bound, autocorrelation sums of h/φ(h), and
//! averages of 𝔖 over families of affine-linear forms.
//!
//! Products are evaluated in log space. The truncated product over p ≤ P
//! is exact up to rounding; the discarded tail over p > P is enclosed in
//! a rigorous interval, so every reported value carries bounds that are
//! guaranteed to contain the true 𝔖.

use std::collections::{BTreeSet, HashMap};
use std::sync::Mutex;

use rayon::prelude::*;

use crate::arith::primes_up_to;
use crate::error::{Error, Result};
use crate::util::{factor_u64, is_prime_u64, KahanSum};

/// A tuple ℋ = {h₁, …, h_k} of distinct integers, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftTuple {
    elements: Vec<i64>,
}

impl ShiftTuple {
    /// Builds a tuple from arbitrary integers; duplicates are collapsed
    /// (the singular series is defined on sets).
    pub fn new(mut elements: Vec<i64>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::invalid("tuple must have k ≥ 1 elements"));
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(Self { elements })
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn k(&self) -> usize {
        self.elements.len()
    }

    /// Largest pairwise gap, 0 for singletons.
    pub fn max_gap(&self) -> u64 {
        if self.elements.len() < 2 {
            0
        } else {
            (self.elements[self.elements.len() - 1] - self.elements[0]) as u64
        }
    }

    pub fn translate(&self, c: i64) -> Self {
        Self {
            elements: self.elements.iter().map(|&h| h + c).collect(),
        }
    }
}

/// ν_p(ℋ) = |{h mod p : h ∈ ℋ}|, the number of residue classes the tuple
/// occupies. Rejects non-prime moduli.
pub fn nu_p(tuple: &ShiftTuple, p: u64) -> Result<u64> {
    if !is_prime_u64(p) {
        return Err(Error::NotPrime(p));
    }
    let mut residues = BTreeSet::new();
    for &h in tuple.elements() {
        residues.insert(h.rem_euclid(p as i64));
    }
    Ok(residues.len() as u64)
}

/// A truncated Euler-product value with a certified tail interval.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct SingularValue {
    /// The truncated product ∏_{p ≤ P} (1 − ν_p/p)(1 − 1/p)^{−k}.
    pub value: f64,
    /// Lower bound certified to sit below the untruncated 𝔖.
    pub tail_low: f64,
    /// Upper bound certified to sit above the untruncated 𝔖.
    pub tail_high: f64,
    /// The truncation point P (all primes ≤ P are included).
    pub truncation_prime: u64,
}

/// Shared evaluation state: the prime list up to the truncation point and
/// a per-k cache of the generic product over primes with ν_p = k.
pub struct SingularEngine {
    truncation_prime: u64,
    primes: Vec<u64>,
    generic_log: Mutex<HashMap<u64, f64>>,
}

/// |log((1−k/p)(1−1/p)^{−k})| ≤ c_k/p² for p > 2k, with c_k = k² + k.
fn tail_constant(k: u64) -> f64 {
    (k * k + k) as f64
}

/// Certified bound on |Σ_{p > P} log factor|: the per-prime bound c_k/p²
/// summed over odd integers beyond P (every prime past P ≥ 3 is odd)
/// gives c_k/(2(P−1)).
fn tail_log_bound(k: u64, p_max: u64) -> f64 {
    tail_constant(k) / (2.0 * (p_max as f64 - 1.0))
}

impl SingularEngine {
    /// Sieves all primes up to `truncation_prime` once.
    pub fn new(truncation_prime: u64) -> Self {
        Self {
            truncation_prime,
            primes: primes_up_to(truncation_prime),
            generic_log: Mutex::new(HashMap::new()),
        }
    }

    pub fn truncation_prime(&self) -> u64 {
        self.truncation_prime
    }

    /// Σ_{k < p ≤ P} log((1 − k/p)(1 − 1/p)^{−k}), cached per k.
    fn generic_log_sum(&self, k: u64) -> f64 {
        if let Some(&v) = self.generic_log.lock().unwrap().get(&k) {
            return v;
        }
        let mut acc = KahanSum::new();
        let kf = k as f64;
        for &p in &self.primes {
            if p <= k {
                continue;
            }
            let pf = p as f64;
            acc.add((1.0 - kf / pf).ln() - kf * (1.0 - 1.0 / pf).ln());
        }
        let v = acc.value();
        self.generic_log.lock().unwrap().insert(k, v);
        v
    }

    /// Evaluates 𝔖(ℋ) = ∏_p (1 − ν_p(ℋ)/p)(1 − 1/p)^{−k} truncated at this
    /// engine's prime bound, with a certified tail interval.
    ///
    /// Requires the truncation point to be at least max(k, largest gap), so
    /// that every omitted prime has ν_p = k, and above 2k, where the tail
    /// constant is valid.
    pub fn singular_series(&self, tuple: &ShiftTuple) -> Result<SingularValue> {
        let p_max = self.truncation_prime;
        let k = tuple.k() as u64;
        if p_max < tuple.max_gap().max(k) || p_max <= 2 * k {
            return Err(Error::invalid(format!(
                "truncation prime {p_max} too small for tuple with k = {k}, gap = {}",
                tuple.max_gap()
            )));
        }
        if k == 1 {
            // ν_p = 1 for every p, so each factor is exactly 1 and the tail
            // vanishes identically.
            return Ok(SingularValue {
                value: 1.0,
                tail_low: 1.0,
                tail_high: 1.0,
                truncation_prime: p_max,
            });
        }

        let mut log_acc = KahanSum::new();
        log_acc.add(self.generic_log_sum(k));

        // Primes p ≤ k always get the exact local factor; a factor can only
        // vanish here (ν_p = p needs p ≤ k).
        for &p in &self.primes {
            if p > k {
                break;
            }
            let nu = nu_p(tuple, p)?;
            if nu == p {
                return Ok(SingularValue {
                    value: 0.0,
                    tail_low: 0.0,
                    tail_high: 0.0,
                    truncation_prime: p_max,
                });
            }
            let pf = p as f64;
            log_acc.add((1.0 - nu as f64 / pf).ln() - k as f64 * (1.0 - 1.0 / pf).ln());
        }

        // Primes k < p ≤ P with ν_p < k divide some pairwise difference;
        // swap their generic factor for the exact one.
        for p in special_primes(tuple) {
            if p <= k || p > p_max {
                continue;
            }
            let nu = nu_p(tuple, p)?;
            if nu < k {
                let pf = p as f64;
                log_acc.add((1.0 - nu as f64 / pf).ln() - (1.0 - k as f64 / pf).ln());
            }
        }

        let value = log_acc.value().exp();
        let tail = tail_log_bound(k, p_max);
        Ok(SingularValue {
            value,
            tail_low: value * (-tail).exp(),
            tail_high: value * tail.exp(),
            truncation_prime: p_max,
        })
    }

    /// The explicit bound ∏_{p>k}(1 − k/p)(1 − 1/p)^{−k} ·
    /// ∏_{i<j} ∏_{p | h_i − h_j} (1 − 1/p)^{−k}, which dominates 𝔖(ℋ).
    ///
    /// The first (infinite) product is truncated at the engine's prime
    /// bound; every omitted factor is ≤ 1, so the truncation alone already
    /// overestimates, and the upward tail allowance is added on top to
    /// keep the certificate one-sided.
    pub fn singular_upper_bound(&self, tuple: &ShiftTuple) -> f64 {
        let k = tuple.k() as u64;
        if k == 1 {
            return 1.0;
        }
        let kf = k as f64;
        let mut log_acc = KahanSum::new();
        log_acc.add(self.generic_log_sum(k));
        log_acc.add(tail_log_bound(k, self.truncation_prime));
        let els = tuple.elements();
        for i in 0..els.len() {
            for j in i + 1..els.len() {
                let d = (els[j] - els[i]).unsigned_abs();
                for (p, _) in factor_u64(d) {
                    log_acc.add(-kf * (1.0 - 1.0 / p as f64).ln());
                }
            }
        }
        log_acc.value().exp()
    }

    /// (1/Hᵐ) Σ_{h ∈ [0,H]^m} 𝔖({L₁(h), …, L_k(h)}), forms deduplicated
    /// pointwise before evaluation.
    pub fn singular_average(&self, h_range: u64, forms: &[AffineForm]) -> Result<f64> {
        if forms.is_empty() {
            return Err(Error::invalid("need at least one form"));
        }
        let m = forms[0].coeffs.len();
        if m == 0 || forms.iter().any(|f| f.coeffs.len() != m) {
            return Err(Error::invalid("all forms must share the dimension m ≥ 1"));
        }
        if h_range == 0 {
            return Err(Error::invalid("h_range must be positive"));
        }
        let points = (h_range + 1).pow(m as u32);
        let block = 1024u64;
        let partials: Result<Vec<f64>> = (0..points.div_ceil(block))
            .into_par_iter()
            .map(|b| {
                let mut acc = KahanSum::new();
                let lo = b * block;
                let hi = ((b + 1) * block).min(points);
                let mut hvec = vec![0i64; m];
                for idx in lo..hi {
                    decode_point(idx, h_range, &mut hvec);
                    let values: Vec<i64> = forms.iter().map(|f| f.eval(&hvec)).collect();
                    let tuple = ShiftTuple::new(values)?;
                    acc.add(self.singular_series(&tuple)?.value);
                }
                Ok(acc.value())
            })
            .collect();
        // Block-ordered reduction keeps the result independent of thread count.
        let mut total = KahanSum::new();
        for p in partials? {
            total.add(p);
        }
        Ok(total.value() / (h_range as f64).powi(m as i32))
    }
}

/// Mixed-radix decode of a flat index into a point of [0, H]^m.
fn decode_point(mut idx: u64, h_range: u64, out: &mut [i64]) {
    let base = h_range + 1;
    for slot in out.iter_mut().rev() {
        *slot = (idx % base) as i64;
        idx /= base;
    }
}

/// Distinct primes dividing some pairwise difference of the tuple.
fn special_primes(tuple: &ShiftTuple) -> BTreeSet<u64> {
    let els = tuple.elements();
    let mut out = BTreeSet::new();
    for i in 0..els.len() {
        for j in i + 1..els.len() {
            let d = (els[j] - els[i]).unsigned_abs();
            for (p, _) in factor_u64(d) {
                out.insert(p);
            }
        }
    }
    out
}

/// One-shot evaluation without caching; builds a throwaway engine.
pub fn singular_series(tuple: &ShiftTuple, truncation_prime: u64) -> Result<SingularValue> {
    SingularEngine::new(truncation_prime).singular_series(tuple)
}

/// A linear form L(h) = a·h + b in one variable.
#[derive(Debug, Clone, Copy)]
pub struct LinearForm {
    pub a: i64,
    pub b: i64,
}

impl LinearForm {
    pub fn eval(&self, h: i64) -> i64 {
        self.a * h + self.b
    }
}

/// An affine-linear form L(h₁,…,h_m) = constant + Σ coeffs[i]·h_i.
#[derive(Debug, Clone)]
pub struct AffineForm {
    pub constant: i64,
    pub coeffs: Vec<i64>,
}

impl AffineForm {
    pub fn eval(&self, h: &[i64]) -> i64 {
        self.constant + self.coeffs.iter().zip(h).map(|(&c, &x)| c * x).sum::<i64>()
    }
}

/// Euler totients φ(0..=limit) by a linear sieve (φ(0) = 0).
pub fn phi_sieve(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut phi = vec![0u64; n + 1];
    if n >= 1 {
        phi[1] = 1;
    }
    let mut primes: Vec<usize> = Vec::new();
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i);
            phi[i] = i as u64 - 1;
        }
        for &p in &primes {
            let ip = i * p;
            if p > spf[i] as usize || ip > n {
                break;
            }
            spf[ip] = p as u32;
            phi[ip] = if i % p == 0 {
                phi[i] * p as u64
            } else {
                phi[i] * (p as u64 - 1)
            };
        }
    }
    phi
}

/// Σ_{h ≤ H} ∏_i (|L_i(h)|/φ(|L_i(h)|))^m with the convention 0/φ(0) = 0.
pub fn phi_ratio_sum(h_max: u64, m: u32, forms: &[LinearForm]) -> Result<f64> {
    if forms.is_empty() {
        return Err(Error::invalid("phi_ratio_sum requires at least one form"));
    }
    let mut max_abs = 1u64;
    for f in forms {
        for h in [1i64, h_max as i64] {
            max_abs = max_abs.max(f.eval(h).unsigned_abs());
        }
    }
    let phi = phi_sieve(max_abs);
    let mut acc = KahanSum::new();
    for h in 1..=h_max as i64 {
        let mut term = 1.0f64;
        for f in forms {
            let v = f.eval(h).unsigned_abs();
            if v == 0 {
                term = 0.0;
                break;
            }
            term *= (v as f64 / phi[v as usize] as f64).powi(m as i32);
        }
        acc.add(term);
    }
    Ok(acc.value())
}
