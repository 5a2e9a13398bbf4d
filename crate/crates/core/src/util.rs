//! Small shared numeric helpers: compensated summation, exact roots of
//! unity, integer factorization of machine words.

use num_complex::Complex64;

/// Kahan–Babuška compensated accumulator for `f64`.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.carry += (self.sum - t) + value;
        } else {
            self.carry += (value - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated accumulator for complex values (componentwise Kahan).
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanComplex {
    re: KahanSum,
    im: KahanSum,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: Complex64) {
        self.re.add(value.re);
        self.im.add(value.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// Table of the `n`-th roots of unity: `entry[r] = e(r/n) = exp(2πi r/n)`.
///
/// Multiplying indices instead of angles keeps rational-phase evaluation
/// exact: `e(a·b/n)` is looked up at index `a·b mod n` with integer
/// arithmetic, so no large-angle reduction error enters.
pub struct RootTable {
    n: u64,
    roots: Vec<Complex64>,
}

impl RootTable {
    pub fn new(n: u64) -> Self {
        assert!(n > 0);
        let roots = (0..n)
            .map(|r| {
                let theta = 2.0 * std::f64::consts::PI * (r as f64) / (n as f64);
                Complex64::new(theta.cos(), theta.sin())
            })
            .collect();
        Self { n, roots }
    }

    pub fn len(&self) -> u64 {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `e(num/n)` for any integer numerator (reduced mod n exactly).
    #[inline]
    pub fn root(&self, num: i64) -> Complex64 {
        self.roots[num.rem_euclid(self.n as i64) as usize]
    }

    /// `e(a·b/n)` with the product reduced in 128-bit arithmetic.
    #[inline]
    pub fn root_mul(&self, a: u64, b: u64) -> Complex64 {
        let idx = ((a as u128) * (b as u128) % (self.n as u128)) as usize;
        self.roots[idx]
    }

    /// `e(-a·b/n)`.
    #[inline]
    pub fn root_mul_neg(&self, a: u64, b: u64) -> Complex64 {
        let idx = ((a as u128) * (b as u128) % (self.n as u128)) as usize;
        if idx == 0 {
            self.roots[0]
        } else {
            self.roots[self.n as usize - idx]
        }
    }
}

/// `e(x) = exp(2πi x)` with the argument reduced mod 1 before the trig calls.
#[inline]
pub fn e_of(x: f64) -> Complex64 {
    let theta = 2.0 * std::f64::consts::PI * x.rem_euclid(1.0);
    Complex64::new(theta.cos(), theta.sin())
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = b;
        b = a % b;
        a = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Trial-division factorization into `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

/// Deterministic trial-division primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Euler's totient by trial division (small arguments only).
pub fn phi_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut phi = n;
    for (p, _) in factor_u64(n) {
        phi = phi / p * (p - 1);
    }
    phi
}

/// `base^exp mod modulus` with 128-bit intermediates.
pub fn pow_mod(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut result = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            result = ((result as u128 * base as u128) % modulus as u128) as u64;
        }
        base = ((base as u128 * base as u128) % modulus as u128) as u64;
        exp >>= 1;
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_catastrophic_sum() {
        let mut k = KahanSum::new();
        k.add(1e16);
        for _ in 0..10_000 {
            k.add(0.1);
        }
        k.add(-1e16);
        assert!((k.value() - 1000.0).abs() < 1e-9);
    }

    #[test]
    fn root_table_rational_phases() {
        let t = RootTable::new(8);
        let z = t.root_mul(3, 5); // e(15/8) = e(7/8)
        assert!((z - e_of(7.0 / 8.0)).norm() < 1e-15);
        let w = t.root_mul_neg(3, 5); // e(-15/8) = e(1/8)
        assert!((w - e_of(1.0 / 8.0)).norm() < 1e-15);
    }

    #[test]
    fn factorization_basics() {
        assert_eq!(factor_u64(1), vec![]);
        assert_eq!(factor_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factor_u64(97), vec![(97, 1)]);
        assert!(is_prime_u64(1_000_003));
        assert!(!is_prime_u64(1_000_001));
        assert_eq!(phi_u64(12), 4);
        assert_eq!(phi_u64(1), 1);
        assert_eq!(pow_mod(3, 100, 101), 1);
    }

    #[test]
    fn gcd_lcm() {
        assert_eq!(gcd(12, 18), 6);
        assert_eq!(lcm(4, 6), 12);
        assert_eq!(gcd(0, 5), 5);
    }
}
