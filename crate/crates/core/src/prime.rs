//! Primes and the small amount of elementary number theory the rest of the
//! crate leans on.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

/// A prime `p`, verified at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if is_prime(p) {
            Ok(Prime(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }

    pub fn big(self) -> BigInt {
        BigInt::from(self.0)
    }

    /// `p^k` as a big integer.
    pub fn pow(self, k: u32) -> BigInt {
        num_traits::pow(self.big(), k as usize)
    }

    /// `p^k` if it fits in a `u64`.
    pub fn pow_u64(self, k: u32) -> Option<u64> {
        self.0.checked_pow(k)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[inline]
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % sp == 0 {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol-style test: is `a` a non-zero square modulo the odd prime `p`?
pub fn is_quadratic_residue(a: u64, p: u64) -> bool {
    let a = a % p;
    if a == 0 {
        return false;
    }
    if p == 2 {
        return true;
    }
    pow_mod(a, (p - 1) / 2, p) == 1
}

/// The non-zero squares modulo `p`, sorted, together with 0.
pub fn quadratic_residues(p: u64) -> Vec<u64> {
    let mut v: Vec<u64> = (0..p).map(|x| mul_mod(x, x, p)).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// A square root of `a` modulo the odd prime `p` (Tonelli–Shanks).
pub fn sqrt_mod(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if !is_quadratic_residue(a, p) {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let mut q = p - 1;
    let mut s = 0u32;
    while q % 2 == 0 {
        q /= 2;
        s += 1;
    }
    let mut z = 2;
    while is_quadratic_residue(z, p) {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, (q + 1) / 2, p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// `ν_p(n)` for `n > 0`.
pub fn nu_p_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n > 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Sum of base-`p` digits of `n`.
pub fn digit_sum(mut n: u64, p: u64) -> u64 {
    let mut s = 0;
    while n > 0 {
        s += n % p;
        n /= p;
    }
    s
}

/// `ν_p(m!) = (m - s_p(m)) / (p - 1)` (Legendre).
pub fn nu_p_factorial(m: u64, p: u64) -> u64 {
    (m - digit_sum(m, p)) / (p - 1)
}

/// `ν_p(x)` for a non-zero big integer.
pub fn nu_p_big(x: &BigInt, p: Prime) -> Option<u32> {
    if x.is_zero() {
        return None;
    }
    let pb = p.big();
    let mut v = 0;
    let mut y = x.clone();
    loop {
        let (q, r) = y.div_rem(&pb);
        if !r.is_zero() {
            return Some(v);
        }
        y = q;
        v += 1;
    }
}

/// `ν_p` of a non-zero rational.
pub fn nu_p_rational(x: &BigRational, p: Prime) -> Option<i64> {
    let n = nu_p_big(x.numer(), p)? as i64;
    let d = nu_p_big(x.denom(), p).unwrap_or(0) as i64;
    Some(n - d)
}

/// Non-negative residue of `x` modulo `m`.
#[inline]
pub(crate) fn modulo(x: &BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

/// Inverse of `x` modulo `m` if `gcd(x, m) = 1`.
pub(crate) fn inverse_mod(x: &BigInt, m: &BigInt) -> Option<BigInt> {
    if m.is_one() {
        return Some(BigInt::zero());
    }
    let g = x.mod_floor(m).extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Residue of a `p`-integral rational modulo `p^k`.
pub fn rational_residue(x: &BigRational, p: Prime, k: u32) -> Result<BigInt> {
    let m = p.pow(k);
    let den = x.denom();
    let inv = inverse_mod(den, &m).ok_or_else(|| {
        Error::InvalidRecurrence(alloc::format!("{x} is not p-integral for p = {p}"))
    })?;
    Ok(modulo(&(x.numer() * inv), &m))
}

/// True when the denominator of `x` is prime to `p`.
pub fn is_p_integral(x: &BigRational, p: Prime) -> bool {
    !(x.denom() % p.big()).is_zero()
}
