//! Shift-correlation sums S(h) = Σ_{n≤X} f(n+h) g(n) for every h ≤ H at
//! once, the exact discrete Fourier identity relating the (2H−h)-weighted
//! sums to a triple product of exponential sums on the discrete circle,
//! and the sifted correlation of Λ-products against integers free of
//! prime factors from prescribed ranges.
//!
//! Two modes compute S: a blocked FFT cross-correlation (overlap-save,
//! with a norm-based a-posteriori error bound) and a direct double loop
//! that exploits sparse g. When the FFT bound exceeds the 1e-6·X budget
//! the engine falls back to the direct path on its own.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::arith::{for_primes_in_range, ArithTable};
use crate::error::{Error, Result};
use crate::util::{KahanComplex, KahanSum, RootTable};

/// Per-factor selector for the shifted multiplicative weights.
#[derive(Debug, Clone)]
pub enum FSelect {
    Mu,
    Liouville,
    /// |μ|: the squarefree indicator; a nonnegative control weight.
    MuAbs,
    One,
    /// User-supplied 1-bounded values, indexed from n = 1.
    Custom(std::sync::Arc<Vec<f64>>),
}

impl FSelect {
    pub fn eval(&self, table: &ArithTable, n: i64) -> f64 {
        match self {
            FSelect::Mu => table.mu(n) as f64,
            FSelect::Liouville => table.liouville(n) as f64,
            FSelect::MuAbs => table.mu(n).abs() as f64,
            FSelect::One => {
                if n >= 1 && (n as u64) < table.end() {
                    1.0
                } else {
                    0.0
                }
            }
            FSelect::Custom(v) => {
                if n >= 1 && (n as usize) <= v.len() {
                    v[n as usize - 1]
                } else {
                    0.0
                }
            }
        }
    }
}

/// The fixed shifts h₂…h_k and a₁…a_ℓ plus the varying-shift bound H.
/// h₁ (the varying shift) is unconstrained and may collide with the
/// fixed shifts; those collisions are computed as-is.
#[derive(Debug, Clone)]
pub struct ShiftSystem {
    /// Selector for the varying factor f₁.
    pub f1: FSelect,
    /// (selector, shift) pairs for the fixed factors f_i(n + h_i), i ≥ 2.
    pub fixed_f: Vec<(FSelect, i64)>,
    /// Shifts a_j of the Λ factors.
    pub fixed_a: Vec<i64>,
    /// Varying shift range: h₁ runs over 1..=h_max.
    pub h_max: u64,
}

impl ShiftSystem {
    pub fn validate(&self) -> Result<()> {
        let mut shifts: Vec<i64> = self.fixed_f.iter().map(|&(_, h)| h).collect();
        shifts.extend_from_slice(&self.fixed_a);
        let mut sorted = shifts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != shifts.len() {
            return Err(Error::invalid(
                "fixed shifts h₂…h_k, a₁…a_ℓ must be pairwise distinct",
            ));
        }
        if self.h_max < 1 {
            return Err(Error::invalid("H must be at least 1"));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        1 + self.fixed_f.len()
    }

    pub fn ell(&self) -> usize {
        self.fixed_a.len()
    }

    pub fn max_shift(&self) -> i64 {
        self.fixed_f
            .iter()
            .map(|&(_, h)| h)
            .chain(self.fixed_a.iter().copied())
            .max()
            .unwrap_or(0)
            .max(0)
    }
}

/// g(n) = ∏_{i≥2} f_i(n+h_i) · ∏_j Λ(n+a_j) on [1, X], with out-of-range
/// factors read as zero. An empty product is 1.
pub fn build_weight(system: &ShiftSystem, table: &ArithTable, x: u64) -> Result<Vec<f64>> {
    system.validate()?;
    let max_shift = system.max_shift();
    table.require_coverage(1, x + max_shift as u64 + 1)?;
    let mut g = vec![0.0f64; x as usize + 1];
    for n in 1..=x as i64 {
        let mut v = 1.0f64;
        for (sel, h) in &system.fixed_f {
            v *= sel.eval(table, n + h);
            if v == 0.0 {
                break;
            }
        }
        if v != 0.0 {
            for &a in &system.fixed_a {
                v *= table.von_mangoldt(n + a);
                if v == 0.0 {
                    break;
                }
            }
        }
        g[n as usize] = v;
    }
    Ok(g)
}

/// f₁ values over [1, X+H] (zero at index 0), optionally masked by a
/// typical-set membership indicator.
pub fn build_f1(
    system: &ShiftSystem,
    table: &ArithTable,
    x: u64,
    mask: Option<&[bool]>,
) -> Result<Vec<f64>> {
    table.require_coverage(1, x + system.h_max + 1)?;
    let len = (x + system.h_max) as usize + 1;
    let mut f = vec![0.0f64; len];
    for n in 1..len {
        let keep = mask.is_none_or(|m| n < m.len() && m[n]);
        if keep {
            f[n] = system.f1.eval(table, n as i64);
        }
    }
    Ok(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CorrMode {
    Fft,
    Direct,
    Auto,
}

/// S(h) for h = 1..=H plus run metadata.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CorrelationReport {
    /// s\[i\] = S(i+1).
    pub s: Vec<f64>,
    pub x: u64,
    pub h_max: u64,
    /// (1/X) Σ_{n≤X} |g(n)|.
    pub e_g: f64,
    pub mode: CorrMode,
    /// A-posteriori bound on the absolute error of any S(h) (0 for the
    /// direct mode).
    pub error_bound: f64,
}

/// All-shifts correlation S(h) = Σ_{n=1}^{X} f(n+h) g(n), h = 1..=H.
///
/// `f` must cover [1, X+H] and `g` must cover [1, X] (both indexed by n
/// with slot 0 ignored). Auto mode tries the FFT path and falls back to
/// the direct one when the error bound exceeds 1e-6·X.
pub fn correlate_all_shifts(
    f: &[f64],
    g: &[f64],
    x: u64,
    h_max: u64,
    mode: CorrMode,
) -> Result<CorrelationReport> {
    if h_max < 1 {
        return Err(Error::invalid("H must be at least 1"));
    }
    if (f.len() as u64) < x + h_max + 1 || (g.len() as u64) < x + 1 {
        return Err(Error::Coverage {
            have_start: 0,
            have_end: f.len().min(g.len()) as u64,
            need_start: 0,
            need_end: x + h_max + 1,
        });
    }
    let e_g = {
        let mut acc = KahanSum::new();
        for v in &g[1..=x as usize] {
            acc.add(v.abs());
        }
        acc.value() / x as f64
    };
    let budget = 1e-6 * x as f64;
    let (s, used_mode, error_bound) = match mode {
        CorrMode::Direct => (direct_correlation(f, g, x, h_max), CorrMode::Direct, 0.0),
        CorrMode::Fft | CorrMode::Auto => {
            let (s, bound) = fft_correlation(f, g, x, h_max);
            if bound > budget {
                (direct_correlation(f, g, x, h_max), CorrMode::Direct, 0.0)
            } else {
                (s, CorrMode::Fft, bound)
            }
        }
    };
    Ok(CorrelationReport {
        s,
        x,
        h_max,
        e_g,
        mode: used_mode,
        error_bound,
    })
}

/// Direct per-shift sums. When g is sparse the inner loop runs over its
/// nonzero support only.
fn direct_correlation(f: &[f64], g: &[f64], x: u64, h_max: u64) -> Vec<f64> {
    let support: Vec<(u32, f64)> = (1..=x as usize)
        .filter(|&n| g[n] != 0.0)
        .map(|n| (n as u32, g[n]))
        .collect();
    (1..=h_max as i64)
        .into_par_iter()
        .map(|h| {
            let mut acc = KahanSum::new();
            for &(n, gv) in &support {
                acc.add(f[n as usize + h as usize] * gv);
            }
            acc.value()
        })
        .collect()
}

/// Overlap-save blocked cross-correlation: for each g-block of length B,
/// one complex FFT of the matching f segment of length B+H, multiplied
/// against the conjugate block transform. Per-block rounding is bounded
/// by γ·log₂(N)·ε·‖f‖₂‖g‖₂ and the bounds are summed across blocks.
fn fft_correlation(f: &[f64], g: &[f64], x: u64, h_max: u64) -> (Vec<f64>, f64) {
    let block = (1usize << 17).min((x as usize).next_power_of_two().max(1024));
    let n_fft = (block + h_max as usize + 1).next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n_fft);
    let inv = planner.plan_fft_inverse(n_fft);

    let n_blocks = (x as usize).div_ceil(block);
    let results: Vec<(Vec<f64>, f64)> = (0..n_blocks)
        .into_par_iter()
        .map(|bi| {
            let lo = bi * block + 1; // first n of the block
            let hi = (lo + block - 1).min(x as usize);
            let blen = hi - lo + 1;
            let mut fa = vec![Complex64::new(0.0, 0.0); n_fft];
            let mut gb = vec![Complex64::new(0.0, 0.0); n_fft];
            // a[j] = f(lo + j), j = 0..blen+H
            let f_end = hi + h_max as usize;
            let mut norm_f = 0.0f64;
            for j in 0..=(f_end - lo) {
                let v = f[lo + j];
                fa[j] = Complex64::new(v, 0.0);
                norm_f += v * v;
            }
            let mut norm_g = 0.0f64;
            for j in 0..blen {
                let v = g[lo + j];
                gb[j] = Complex64::new(v, 0.0);
                norm_g += v * v;
            }
            fwd.process(&mut fa);
            fwd.process(&mut gb);
            for (a, b) in fa.iter_mut().zip(&gb) {
                *a *= b.conj();
            }
            inv.process(&mut fa);
            // out[h] = Σ_j g(lo+j) f(lo+j+h), h = 0..=H
            let scale = 1.0 / n_fft as f64;
            let out: Vec<f64> = (1..=h_max as usize).map(|h| fa[h].re * scale).collect();
            let eps = f64::EPSILON;
            let bound = 6.0 * eps * (n_fft as f64).log2() * (norm_f.sqrt() * norm_g.sqrt());
            (out, bound)
        })
        .collect();
    let mut s = vec![0.0f64; h_max as usize];
    let mut bound = 0.0f64;
    for (out, b) in results {
        for (acc, v) in s.iter_mut().zip(out) {
            *acc += v;
        }
        bound += b;
    }
    (s, bound)
}

/// Unimodular coefficients carrying the phase of S(h) (1 where S(h) = 0).
pub fn phase_coefficients(f: &[f64], g: &[f64], x: u64, two_h: u64) -> Result<Vec<Complex64>> {
    let report = correlate_all_shifts(f, g, x, two_h, CorrMode::Direct)?;
    let mut c = vec![Complex64::new(1.0, 0.0); two_h as usize + 1];
    for (slot, &v) in c[1..].iter_mut().zip(&report.s) {
        if v != 0.0 {
            // real S: the phase is the sign
            *slot = Complex64::new(v.signum(), 0.0);
        }
    }
    Ok(c)
}

/// Seeded random unimodular coefficients on [1, 2H].
pub fn seeded_unimodular(two_h: u64, seed: u64) -> Vec<Complex64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut c = vec![Complex64::new(1.0, 0.0); two_h as usize + 1];
    for v in c.iter_mut().skip(1) {
        *v = Complex64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
    }
    c
}

/// Both sides of the exact discrete identity
/// (1/H) Σ_{h≤2H} (2H−h) c(h) S(h)
///   = (1/H)(1/N) Σ_{j<N} C₀(j/N) · Σ_m F_m(−j/N) G_m(j/N),
/// where the inner sum runs over all unit x-intervals (m, m+1) with
/// window {m+1, …, m+2H}, F uses f on [1, X+2H], G uses g on [1, X]
/// (values beyond X are ignored), and N ≥ X + 4H + 1 resolves every
/// frequency of the triple product.
#[derive(Debug, Clone, Copy)]
pub struct FourierIdentity {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub residual: f64,
}

pub fn fourier_identity_check(
    f: &[f64],
    g: &[f64],
    x: u64,
    h: u64,
    c: &[Complex64],
    n_points: Option<u64>,
) -> Result<FourierIdentity> {
    if h < 1 {
        return Err(Error::invalid("H must be positive"));
    }
    let two_h = 2 * h;
    if (f.len() as u64) < x + two_h + 1 {
        return Err(Error::Coverage {
            have_start: 0,
            have_end: f.len() as u64,
            need_start: 0,
            need_end: x + two_h + 1,
        });
    }
    if (c.len() as u64) < two_h + 1 {
        return Err(Error::invalid("need c(h) for h = 1..=2H"));
    }
    let n_min = x + 4 * h + 1;
    let n_pts = n_points.unwrap_or(n_min);
    if n_pts < n_min {
        return Err(Error::invalid(format!(
            "N = {n_pts} cannot resolve the identity; need N ≥ {n_min}"
        )));
    }

    // lhs: the weighted correlation sums, directly.
    let mut lhs_acc = KahanComplex::new();
    for shift in 1..=two_h {
        let mut s = KahanSum::new();
        for n in 1..=x as usize {
            let gv = g.get(n).copied().unwrap_or(0.0);
            if gv != 0.0 {
                s.add(f[n + shift as usize] * gv);
            }
        }
        lhs_acc.add(c[shift as usize] * (two_h - shift) as f64 * s.value());
    }
    let lhs = lhs_acc.value() / h as f64;

    // rhs: the discrete-circle triple product, windows slid across the
    // whole support with exact rational phases.
    let roots = RootTable::new(n_pts);
    let g_read = |n: i64| -> f64 {
        if n >= 1 && n <= x as i64 {
            g.get(n as usize).copied().unwrap_or(0.0)
        } else {
            0.0
        }
    };
    let f_read = |n: i64| -> f64 {
        if n >= 1 && n < f.len() as i64 {
            f[n as usize]
        } else {
            0.0
        }
    };
    let m_lo = -(two_h as i64);
    let m_hi = x as i64 + two_h as i64;
    let rhs_terms: Vec<Complex64> = (0..n_pts)
        .into_par_iter()
        .map(|j| {
            // C0(j/N)
            let mut c0 = KahanComplex::new();
            for shift in 1..=two_h {
                c0.add(c[shift as usize] * roots.root_mul(shift, j));
            }
            // T(j) = Σ_m F_m(−α) G_m(α), windows updated by sliding
            let mut fwin = KahanComplex::new();
            let mut gwin = KahanComplex::new();
            for n in m_lo + 1..=m_lo + two_h as i64 {
                fwin.add(f_read(n) * root_at(&roots, -n, j));
                gwin.add(g_read(n) * root_at(&roots, n, j));
            }
            let mut t = KahanComplex::new();
            t.add(fwin.value() * gwin.value());
            let mut fcur = fwin.value();
            let mut gcur = gwin.value();
            for m in m_lo + 1..=m_hi {
                let drop_n = m;
                let add_n = m + two_h as i64;
                fcur += -f_read(drop_n) * root_at(&roots, -drop_n, j)
                    + f_read(add_n) * root_at(&roots, -add_n, j);
                gcur += -g_read(drop_n) * root_at(&roots, drop_n, j)
                    + g_read(add_n) * root_at(&roots, add_n, j);
                t.add(fcur * gcur);
            }
            c0.value() * t.value()
        })
        .collect();
    let mut rhs_acc = KahanComplex::new();
    for v in rhs_terms {
        rhs_acc.add(v);
    }
    let rhs = rhs_acc.value() / (h as f64 * n_pts as f64);

    Ok(FourierIdentity {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

#[inline]
fn root_at(roots: &RootTable, multiple: i64, j: u64) -> Complex64 {
    // e(multiple·j/N) with multiple possibly negative
    let n = roots.len() as i64;
    let m = multiple.rem_euclid(n) as u64;
    roots.root_mul(m, j)
}

/// Sifted correlation against factor-restricted integers: the sum side
/// lhs = Σ_{n≤X} 1_𝒩(n+h) ∏_j Λ(n+a_j), where 𝒩 avoids all prime factors
/// from the given ranges, against the reference envelope
/// rhs = const · X · ∏_j (|h−a_j|/φ(|h−a_j|))^{2^{ℓ+1}} · ∏_{p∈ℐ}(1−1/p).
pub fn sifted_correlation(
    h: u64,
    interval_family: &[(u64, u64)],
    fixed_a: &[i64],
    x: u64,
    table: &ArithTable,
    constant: f64,
) -> Result<(f64, f64)> {
    if fixed_a.iter().any(|&a| a >= 0 && a as u64 == h) {
        return Err(Error::invalid("h must differ from every a_j"));
    }
    let max_a = fixed_a.iter().copied().max().unwrap_or(0).max(0) as u64;
    table.require_coverage(1, x + h.max(max_a) + 1)?;

    // indicator of "no prime factor in any range" over [1, X+h]
    let top = x + h;
    let mut sifted_out = vec![false; top as usize + 1];
    for &(lo, hi) in interval_family {
        for_primes_in_range(lo, hi.min(top), |p| {
            let mut m = p;
            while m <= top {
                sifted_out[m as usize] = true;
                m += p;
            }
        });
    }

    let mut acc = KahanSum::new();
    for n in 1..=x {
        if sifted_out[(n + h) as usize] {
            continue;
        }
        let mut v = 1.0f64;
        for &a in fixed_a {
            v *= table.von_mangoldt(n as i64 + a);
            if v == 0.0 {
                break;
            }
        }
        if v != 0.0 {
            acc.add(v);
        }
    }
    let lhs = acc.value();

    let ell = fixed_a.len() as u32;
    let expo = 2i32.pow(ell + 1);
    let mut rhs = constant * x as f64;
    for &a in fixed_a {
        let d = (h as i64 - a).unsigned_abs();
        if d > 0 {
            rhs *= (d as f64 / crate::util::phi_u64(d) as f64).powi(expo);
        }
    }
    let mut log_prod = KahanSum::new();
    for &(lo, hi) in interval_family {
        for_primes_in_range(lo, hi, |p| log_prod.add((-1.0 / p as f64).ln_1p()));
    }
    rhs *= log_prod.value().exp();
    Ok((lhs, rhs))
}
