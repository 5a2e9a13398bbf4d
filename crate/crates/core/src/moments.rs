//! Short-interval exponential sums, the sup-of-integral statistic
//! α ↦ ∫₀ˣ |F_x(α)|² dx, and the even moments
//! M_{2k} = ∫₀ˣ ∫₀¹ |Σ_{x≤n≤x+H} w(n) e(αn)|^{2k} dα dx
//! by three mutually validating routes:
//!
//! * counting — the orthogonality expansion into 2k-tuples with
//!   n₁+⋯+n_k = n_{k+1}+⋯+n_{2k}, each weighted by its exact overlap
//!   length (H − M on the interior, clipped exactly at the ends of [0,X]);
//! * convolution — per unit x-interval, the k-fold self-convolution of the
//!   window coefficients and Parseval, with sliding-window updates;
//! * quadrature — the α-integral on a uniform grid of 8kH points, which
//!   is exact for a trigonometric polynomial of degree kH.
//!
//! Integer H makes the x-integral decompose exactly over unit intervals:
//! for x ∈ (m, m+1) the window [x, x+H] contains precisely the integers
//! m+1, …, m+H.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::trigpoly::{SupResult, TrigPoly};
use crate::util::{e_of, KahanComplex, KahanSum, RootTable};

/// Σ_{x ≤ n ≤ x+H} w(n) e(αn). The weight slice is indexed by n and must
/// cover the closed window.
pub fn exp_sum(w: &[Complex64], x: u64, h: u64, alpha: f64) -> Result<Complex64> {
    let end = x + h;
    if end >= w.len() as u64 {
        return Err(Error::OutOfWindow {
            n: end,
            start: 0,
            end: w.len() as u64,
        });
    }
    let mut acc = KahanComplex::new();
    for n in x..=end {
        acc.add(w[n as usize] * e_of(alpha * n as f64));
    }
    Ok(acc.value())
}

/// Certified supremum of α ↦ ∫₀ˣ |Σ_{x≤n≤x+2H} f(n) e(nα)|² dx.
#[derive(Debug, Clone, Copy)]
pub struct H2Result {
    pub sup_value: f64,
    pub argmax_alpha: f64,
    /// Gap certificate from the dense-grid scan: the true supremum is at
    /// most sup_value + certificate.
    pub certificate: f64,
    /// sup_value / (H² X), the scale the sup is compared against.
    pub normalized: f64,
}

/// Builds the exact trigonometric polynomial of ∫₀ˣ |F_x(α)|² dx, where
/// F_x(α) = Σ_{x ≤ n ≤ x+2H} f(n) e(nα), and locates its supremum.
///
/// The polynomial has frequencies |d| ≤ 2H with coefficients given by the
/// weighted autocorrelations Σ_n f(n+d) conj(f(n)) · |{x ∈ [0,X] :
/// x ≤ n, n+d ≤ x+2H}|; the x-overlap length is computed exactly.
pub fn h2_statistic(f: &[Complex64], x_end: u64, h: u64) -> Result<H2Result> {
    if h < 1 {
        return Err(Error::invalid("H must be a positive integer"));
    }
    let window = 2 * h;
    let len = f.len() as i64;
    let x = x_end as i64;
    let deg = window as usize;
    let coeffs: Vec<Complex64> = (0..=window as i64)
        .into_par_iter()
        .map(|d| {
            let mut acc = KahanComplex::new();
            for n in 0..len - d {
                let lo = 0i64.max(n + d - window as i64);
                let hi = x.min(n);
                if hi > lo {
                    acc.add(f[(n + d) as usize] * f[n as usize].conj() * (hi - lo) as f64);
                }
            }
            acc.value()
        })
        .collect();
    let mut poly = TrigPoly::zero(deg);
    for (d, &c) in coeffs.iter().enumerate() {
        *poly.coeff_mut(d as i64) = c;
        if d > 0 {
            *poly.coeff_mut(-(d as i64)) = c.conj();
        }
    }
    let SupResult {
        sup_value,
        argmax_alpha,
        certificate,
    } = poly.sup_real()?;
    Ok(H2Result {
        sup_value,
        argmax_alpha,
        certificate,
        normalized: sup_value / ((h * h) as f64 * x_end as f64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum MomentMethod {
    Counting,
    Convolution,
    Quadrature,
}

impl std::fmt::Display for MomentMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MomentMethod::Counting => "counting",
            MomentMethod::Convolution => "convolution",
            MomentMethod::Quadrature => "quadrature",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct MomentReport {
    pub x: u64,
    pub h: u64,
    pub k: u32,
    pub method: MomentMethod,
    pub value: f64,
    /// value / (X · H^{2k−1}); 0 when H = 0.
    pub normalized: f64,
}

/// M_{2k} for the weight slice `w` (indexed by n, covering [0, X+H]).
pub fn moment_m2k(
    w: &[Complex64],
    x: u64,
    h: u64,
    k: u32,
    method: MomentMethod,
) -> Result<MomentReport> {
    if k < 1 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if x < 1 {
        return Err(Error::invalid("X must be positive"));
    }
    if (w.len() as u64) < x + h + 1 {
        return Err(Error::Coverage {
            have_start: 0,
            have_end: w.len() as u64,
            need_start: 0,
            need_end: x + h + 1,
        });
    }
    let value = if h == 0 {
        0.0
    } else {
        match method {
            MomentMethod::Counting => counting_path(w, x, h, k),
            MomentMethod::Convolution => convolution_path(w, x, h, k)?,
            MomentMethod::Quadrature => quadrature_path(w, x, h, k)?,
        }
    };
    let normalized = if h == 0 {
        0.0
    } else {
        value / (x as f64 * (h as f64).powi(2 * k as i32 - 1))
    };
    Ok(MomentReport {
        x,
        h,
        k,
        method,
        value,
        normalized,
    })
}

#[inline]
fn wget(w: &[Complex64], i: i64) -> Complex64 {
    if i < 0 || i >= w.len() as i64 {
        Complex64::new(0.0, 0.0)
    } else {
        w[i as usize]
    }
}

/// Exact overlap length |{x ∈ [0,X] : x ≤ n+o_min, n+o_max ≤ x+H}|.
#[inline]
fn overlap(n: i64, o_min: i64, o_max: i64, x: i64, h: i64) -> f64 {
    let lo = 0i64.max(n + o_max - h);
    let hi = x.min(n + o_min);
    (hi - lo).max(0) as f64
}

fn counting_path(w: &[Complex64], x: u64, h: u64, k: u32) -> f64 {
    let hs = h as i64;
    let xs = x as i64;
    let k = k as usize;
    if k == 1 {
        // only the diagonal n₁ = n₂ survives the constraint
        let mut acc = KahanSum::new();
        for n in 1..=xs + hs {
            let wt = overlap(n, 0, 0, xs, hs);
            if wt > 0.0 {
                acc.add(wget(w, n).norm_sqr() * wt);
            }
        }
        return acc.value();
    }
    let free = 2 * k - 2;
    let base: u64 = (2 * h + 1).pow(free as u32);
    let block = 1u64 << 12;
    let partials: Vec<Complex64> = (0..base.div_ceil(block))
        .into_par_iter()
        .map(|b| {
            let mut acc = KahanComplex::new();
            let mut offsets = vec![0i64; 2 * k];
            for code in b * block..((b + 1) * block).min(base) {
                // decode the free offsets o_1..o_{2k-2} in [-H, H]
                let mut c = code;
                for o in offsets.iter_mut().take(free) {
                    *o = (c % (2 * h + 1)) as i64 - hs;
                    c /= 2 * h + 1;
                }
                offsets[2 * k - 1] = 0;
                // o_{2k-1} balances Σ first half = Σ second half
                let s1: i64 = offsets[..k].iter().sum();
                let s2: i64 = offsets[k..2 * k - 2].iter().sum();
                let determined = s1 - s2;
                if determined.abs() > hs {
                    continue;
                }
                offsets[2 * k - 2] = determined;
                let o_min = *offsets.iter().min().unwrap();
                let o_max = *offsets.iter().max().unwrap();
                if o_max - o_min >= hs {
                    continue; // weight (H − M) vanishes for M ≥ H
                }
                for n in (1 - o_min).max(0)..=(xs + hs - o_max) {
                    let wt = overlap(n, o_min, o_max, xs, hs);
                    if wt <= 0.0 {
                        continue;
                    }
                    let mut term = Complex64::new(wt, 0.0);
                    for &o in &offsets[..k] {
                        term *= wget(w, n + o);
                    }
                    for &o in &offsets[k..] {
                        term *= wget(w, n + o).conj();
                    }
                    acc.add(term);
                }
            }
            acc.value()
        })
        .collect();
    let mut total = KahanComplex::new();
    for p in partials {
        total.add(p);
    }
    let v = total.value();
    debug_assert!(v.im.abs() <= 1e-6 * v.re.abs().max(1.0));
    v.re
}

/// Per unit interval (m, m+1) the window holds w[m+1..=m+H]; Parseval
/// turns the α-integral of |F|^{2k} into the coefficient energy of the
/// k-th power of the window polynomial.
fn convolution_path(w: &[Complex64], x: u64, h: u64, k: u32) -> Result<f64> {
    match k {
        1 => Ok(convolution_k1(w, x, h)),
        2 => Ok(convolution_k2_sliding(w, x, h)),
        _ => {
            let cost = x as u128 * (k as u128).pow(2) * (h as u128).pow(2);
            if cost > 4_000_000_000 {
                return Err(Error::invalid(
                    "generic convolution path too large; available for k ≥ 3 only at small X·k²·H²",
                ));
            }
            Ok(convolution_generic(w, x, h, k))
        }
    }
}

fn convolution_k1(w: &[Complex64], x: u64, h: u64) -> f64 {
    let mut total = KahanSum::new();
    let mut window = 0.0f64;
    for n in 1..=h {
        window += wget(w, n as i64).norm_sqr();
    }
    total.add(window);
    for m in 1..x {
        window -= wget(w, m as i64).norm_sqr();
        window += wget(w, (m + h) as i64).norm_sqr();
        total.add(window);
    }
    total.value()
}

/// k = 2 by sliding autocorrelations: |F_m|² = Σ_d r_d(m) e(dα) with
/// r_d(m) = Σ_n w(n) conj(w(n−d)) over the window, and
/// ∫|F_m|⁴ = |r_0|² + 2 Σ_{d≥1} |r_d|². Each slide updates every r_d in
/// O(1); blocks re-derive r from scratch so rounding cannot accumulate
/// across the whole x-range.
fn convolution_k2_sliding(w: &[Complex64], x: u64, h: u64) -> f64 {
    const BLOCK: u64 = 4096;
    let partials: Vec<f64> = (0..x.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let m_lo = b * BLOCK;
            let m_hi = ((b + 1) * BLOCK).min(x);
            let mut acc = KahanSum::new();
            // r[d] for window {m_lo+1, …, m_lo+H}
            let mut r = vec![Complex64::new(0.0, 0.0); h as usize];
            for d in 0..h as i64 {
                let mut s = KahanComplex::new();
                for n in (m_lo as i64 + 1 + d)..=(m_lo as i64 + h as i64) {
                    s.add(wget(w, n) * wget(w, n - d).conj());
                }
                r[d as usize] = s.value();
            }
            let energy = |r: &[Complex64]| {
                let mut s = r[0].norm_sqr();
                for v in &r[1..] {
                    s += 2.0 * v.norm_sqr();
                }
                s
            };
            acc.add(energy(&r));
            for m in m_lo + 1..m_hi {
                let out = m as i64; // leaves the window
                let inn = (m + h) as i64; // enters the window
                let wo = wget(w, out);
                let wi = wget(w, inn);
                r[0] += Complex64::new(wi.norm_sqr() - wo.norm_sqr(), 0.0);
                for d in 1..h as i64 {
                    r[d as usize] +=
                        wi * wget(w, inn - d).conj() - wget(w, out + d) * wo.conj();
                }
                acc.add(energy(&r));
            }
            acc.value()
        })
        .collect();
    let mut total = KahanSum::new();
    for p in partials {
        total.add(p);
    }
    total.value()
}

fn convolution_generic(w: &[Complex64], x: u64, h: u64, k: u32) -> f64 {
    let partials: Vec<f64> = (0..x)
        .into_par_iter()
        .map(|m| {
            let window: Vec<Complex64> =
                (1..=h).map(|i| wget(w, (m + i) as i64)).collect();
            let mut cur = window.clone();
            for _ in 2..=k {
                cur = convolve(&cur, &window);
            }
            cur.iter().map(|c| c.norm_sqr()).sum::<f64>()
        })
        .collect();
    let mut total = KahanSum::new();
    for p in partials {
        total.add(p);
    }
    total.value()
}

fn convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Uniform N-point α-quadrature with N = 8kH: exact for the degree-kH
/// polynomial |F|^{2k} up to rounding. Rejected for kH > 1e4.
fn quadrature_path(w: &[Complex64], x: u64, h: u64, k: u32) -> Result<f64> {
    let kh = k as u64 * h;
    if kh > 10_000 {
        return Err(Error::QuadratureBudget(kh));
    }
    let n_pts = (8 * kh).max(8) as usize;
    let roots = RootTable::new(n_pts as u64);
    let partials: Vec<f64> = (0..x)
        .into_par_iter()
        .map(|m| {
            let mut s = 0.0;
            for j in 0..n_pts as u64 {
                // global phase of the window start drops out of |F|
                let mut f = Complex64::new(0.0, 0.0);
                for i in 0..h {
                    f += wget(w, (m + 1 + i) as i64) * roots.root_mul(i, j);
                }
                s += f.norm_sqr().powi(k as i32);
            }
            s / n_pts as f64
        })
        .collect();
    let mut total = KahanSum::new();
    for p in partials {
        total.add(p);
    }
    Ok(total.value())
}

/// The constant making the p-th moment inequality an equality:
/// C = M_p / (H^{p−1} · X · E_w^p) with E_w = max(1, (1/X) Σ_{n≤X} |w(n)|).
pub fn h1_constant(w: &[Complex64], x: u64, h: u64, p_even: u32) -> Result<f64> {
    if p_even < 2 || !p_even.is_multiple_of(2) {
        return Err(Error::invalid("p must be an even integer ≥ 2"));
    }
    let k = p_even / 2;
    let m = moment_m2k(w, x, h, k, MomentMethod::Convolution)?;
    let mean: f64 = (1..=x.min(w.len() as u64 - 1))
        .map(|n| w[n as usize].norm())
        .sum::<f64>()
        / x as f64;
    let e_w = mean.max(1.0);
    if m.value == 0.0 {
        return Ok(0.0);
    }
    Ok(m.value / ((h as f64).powi(p_even as i32 - 1) * x as f64 * e_w.powi(p_even as i32)))
}

/// Lifts a real weight array into the complex weights the moment and
/// h2 paths consume.
pub fn complex_weights(real: &[f64]) -> Vec<Complex64> {
    real.iter().map(|&v| Complex64::new(v, 0.0)).collect()
}
