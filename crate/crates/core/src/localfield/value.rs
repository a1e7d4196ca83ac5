use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{ExtensionField, FieldKind, Valuation};
use crate::prime::{inverse_mod, modulo, nu_p_big, rational_residue};
use crate::{Error, Result};

/// An element of `O_K` known modulo `π^N`.
///
/// Coordinates are taken in the basis `{1, γ}` and kept canonical: for
/// precision `N` coordinate `j` lies in `[0, p^{k_j})` where `(k_0, k_1)` is
/// `(N, N)` for `e = 1` and `(⌈N/2⌉, ⌊N/2⌋)` for ramified fields. Two values
/// are equal iff field, precision and coordinates agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicValue {
    field: ExtensionField,
    c0: BigInt,
    c1: BigInt,
    prec: u32,
}

impl PadicValue {
    pub(crate) fn raw(field: &ExtensionField, c0: BigInt, c1: BigInt, prec: u32) -> Self {
        let prec = prec.min(field.max_precision());
        let (k0, k1) = field.coord_exponents(prec);
        let c0 = modulo(&c0, &field.p_pow(k0));
        let c1 = if k1 == 0 {
            BigInt::zero()
        } else {
            modulo(&c1, &field.p_pow(k1))
        };
        PadicValue {
            field: field.clone(),
            c0,
            c1,
            prec,
        }
    }

    /// Build from coordinates (length = degree of the field).
    pub fn from_coeffs(field: &ExtensionField, coeffs: &[BigInt], prec: u32) -> Result<Self> {
        if coeffs.len() != field.degree() as usize {
            return Err(Error::InvalidArgument(alloc::format!(
                "expected {} coordinates, got {}",
                field.degree(),
                coeffs.len()
            )));
        }
        let c1 = coeffs.get(1).cloned().unwrap_or_default();
        Ok(Self::raw(field, coeffs[0].clone(), c1, prec))
    }

    pub fn from_bigint(field: &ExtensionField, x: BigInt, prec: u32) -> Self {
        Self::raw(field, x, BigInt::zero(), prec)
    }

    pub fn from_int(field: &ExtensionField, x: i64, prec: u32) -> Self {
        Self::from_bigint(field, BigInt::from(x), prec)
    }

    /// A `p`-integral rational, embedded in `field`.
    pub fn from_rational(field: &ExtensionField, x: &BigRational, prec: u32) -> Result<Self> {
        let prec = prec.min(field.max_precision());
        let (k0, _) = field.coord_exponents(prec);
        let r = rational_residue(x, field.p(), k0)?;
        Ok(Self::raw(field, r, BigInt::zero(), prec))
    }

    pub fn zero(field: &ExtensionField, prec: u32) -> Self {
        Self::from_int(field, 0, prec)
    }

    pub fn one(field: &ExtensionField, prec: u32) -> Self {
        Self::from_int(field, 1, prec)
    }

    /// The basis generator `γ` (zero in `Q_p`).
    pub fn generator(field: &ExtensionField, prec: u32) -> Self {
        if field.degree() == 1 {
            return Self::zero(field, prec);
        }
        Self::raw(field, BigInt::zero(), BigInt::one(), prec)
    }

    pub fn field(&self) -> &ExtensionField {
        &self.field
    }

    /// Absolute precision `N` in `π`-units.
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Coordinates in the basis `{1, γ}` (length = degree).
    pub fn coeffs(&self) -> Vec<BigInt> {
        if self.field.degree() == 1 {
            vec![self.c0.clone()]
        } else {
            vec![self.c0.clone(), self.c1.clone()]
        }
    }

    pub fn coeff(&self, i: usize) -> &BigInt {
        if i == 0 {
            &self.c0
        } else {
            &self.c1
        }
    }

    /// Reduce to precision `min(n, N)`.
    pub fn truncate(&self, n: u32) -> Self {
        if n >= self.prec {
            return self.clone();
        }
        Self::raw(&self.field, self.c0.clone(), self.c1.clone(), n)
    }

    /// Reinterpret at a higher precision by padding with zero digits.
    pub fn lift(&self, n: u32) -> Self {
        if n <= self.prec {
            return self.clone();
        }
        Self::raw(&self.field, self.c0.clone(), self.c1.clone(), n)
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    /// `π`-adic valuation, `≥ N` when the value is zero at its precision.
    pub fn valuation(&self) -> Valuation {
        if self.is_zero() {
            return Valuation::AtLeast(self.prec);
        }
        let p = self.field.p();
        let v0 = nu_p_big(&self.c0, p);
        let v1 = nu_p_big(&self.c1, p);
        let v = match self.field.kind() {
            FieldKind::Base => v0.unwrap(),
            FieldKind::Unramified => match (v0, v1) {
                (Some(a), Some(b)) => a.min(b),
                (Some(a), None) | (None, Some(a)) => a,
                (None, None) => unreachable!(),
            },
            FieldKind::Ramified => {
                let a = v0.map(|v| 2 * v);
                let b = v1.map(|v| 2 * v + 1);
                match (a, b) {
                    (Some(a), Some(b)) => a.min(b),
                    (Some(a), None) | (None, Some(a)) => a,
                    (None, None) => unreachable!(),
                }
            }
        };
        Valuation::Exact(v)
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Exact(0)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::raw(
            &self.field,
            &self.c0 + &other.c0,
            &self.c1 + &other.c1,
            self.prec.min(other.prec),
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self::raw(
            &self.field,
            &self.c0 - &other.c0,
            &self.c1 - &other.c1,
            self.prec.min(other.prec),
        ))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let prec = self.prec.min(other.prec);
        if self.field.degree() == 1 {
            return Ok(Self::raw(
                &self.field,
                &self.c0 * &other.c0,
                BigInt::zero(),
                prec,
            ));
        }
        let (a, b) = (&self.c0, &self.c1);
        let (c, d) = (&other.c0, &other.c1);
        let bd = b * d;
        let c0 = a * c - &bd * self.field.gen_c();
        let c1 = a * d + b * c - &bd * self.field.gen_b();
        Ok(Self::raw(&self.field, c0, c1, prec))
    }

    pub fn mul_bigint(&self, k: &BigInt) -> Self {
        Self::raw(&self.field, &self.c0 * k, &self.c1 * k, self.prec)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self.mul_bigint(&BigInt::from(k))
    }

    /// `x · π^k`; the precision grows by `k`.
    pub fn mul_pi_pow(&self, k: u32) -> Self {
        match self.field.kind() {
            FieldKind::Ramified => {
                let mut x = self.clone();
                for _ in 0..k {
                    let c0 = -(&x.c1 * self.field.gen_c());
                    let c1 = &x.c0 - &x.c1 * self.field.gen_b();
                    x = Self::raw(&self.field, c0, c1, x.prec + 1);
                }
                x
            }
            _ => {
                let pk = self.field.p_pow(k);
                Self::raw(
                    &self.field,
                    &self.c0 * pk.as_ref(),
                    &self.c1 * pk.as_ref(),
                    self.prec + k,
                )
            }
        }
    }

    /// Exact division by `π^k`; fails unless the valuation is at least `k`.
    /// The precision drops by `k`.
    pub fn div_pi_pow(&self, k: u32) -> Result<Self> {
        if k == 0 {
            return Ok(self.clone());
        }
        if k > self.prec || self.valuation().bound() < k {
            return Err(Error::NotInvertible);
        }
        match self.field.kind() {
            FieldKind::Ramified => {
                let p = self.field.p().big();
                let c_over_p = self.field.gen_c() / &p;
                let modulus = self.field.p_pow(self.prec);
                let inv = inverse_mod(&c_over_p, &modulus).ok_or(Error::NotInvertible)?;
                let neg_inv = -inv;
                let mut x = self.clone();
                for _ in 0..k {
                    // x / γ = -x (γ + B) / C
                    let y0 = &x.c0 * self.field.gen_b() - &x.c1 * self.field.gen_c();
                    let y1 = x.c0.clone();
                    let z0 = y0 / &p;
                    let z1 = y1 / &p;
                    x = Self::raw(&self.field, z0 * &neg_inv, z1 * &neg_inv, x.prec - 1);
                }
                Ok(x)
            }
            _ => {
                let pk = self.field.p_pow(k);
                Ok(Self::raw(
                    &self.field,
                    &self.c0 / pk.as_ref(),
                    &self.c1 / pk.as_ref(),
                    self.prec - k,
                ))
            }
        }
    }

    /// Exact division by `p^k`; the precision drops by `e·k`.
    pub fn div_p_pow(&self, k: u32) -> Result<Self> {
        let e = self.field.e();
        if k == 0 {
            return Ok(self.clone());
        }
        if e * k > self.prec || self.valuation().bound() < e * k {
            return Err(Error::NotInvertible);
        }
        let pk = self.field.p_pow(k);
        Ok(Self::raw(
            &self.field,
            &self.c0 / pk.as_ref(),
            &self.c1 / pk.as_ref(),
            self.prec - e * k,
        ))
    }

    pub fn pow_u64(&self, mut n: u64) -> Self {
        let mut acc = Self::one(&self.field, self.prec);
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = &acc * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn pow_big(&self, n: &BigUint) -> Self {
        let mut acc = Self::one(&self.field, self.prec);
        for i in (0..n.bits()).rev() {
            acc = &acc * &acc;
            if n.bit(i) {
                acc = &acc * self;
            }
        }
        acc
    }

    /// Conjugate under the non-trivial automorphism (identity on `Q_p`).
    pub fn conjugate(&self) -> Self {
        if self.field.degree() == 1 {
            return self.clone();
        }
        // γ ↦ -B - γ
        Self::raw(
            &self.field,
            &self.c0 - &self.c1 * self.field.gen_b(),
            -&self.c1,
            self.prec,
        )
    }

    /// `N_{K/Q_p}(x) = det M_x`, as an element of `Q_p`.
    pub fn norm(&self) -> PadicValue {
        let base = ExtensionField::base(self.field.p());
        let n = (self.prec + self.field.e() - 1) / self.field.e();
        if self.field.degree() == 1 {
            return Self::raw(&base, self.c0.clone(), BigInt::zero(), n);
        }
        let (a, b) = (&self.c0, &self.c1);
        let v = a * a - a * b * self.field.gen_b() + b * b * self.field.gen_c();
        Self::raw(&base, v, BigInt::zero(), n)
    }

    /// Multiplicative inverse of a unit.
    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotInvertible);
        }
        let (k0, _) = self.field.coord_exponents(self.prec);
        let m = self.field.p_pow(k0);
        if self.field.degree() == 1 {
            let inv = inverse_mod(&self.c0, &m).ok_or(Error::NotInvertible)?;
            return Ok(Self::raw(&self.field, inv, BigInt::zero(), self.prec));
        }
        let (a, b) = (&self.c0, &self.c1);
        let n = a * a - a * b * self.field.gen_b() + b * b * self.field.gen_c();
        let ninv = inverse_mod(&n, &m).ok_or(Error::NotInvertible)?;
        let conj0 = a - b * self.field.gen_b();
        let conj1 = -b;
        Ok(Self::raw(
            &self.field,
            conj0 * &ninv,
            conj1 * &ninv,
            self.prec,
        ))
    }

    /// The value as an element of `Q_p` when its `γ`-coordinate vanishes.
    pub fn to_base(&self) -> Option<PadicValue> {
        if !self.c1.is_zero() {
            return None;
        }
        let base = ExtensionField::base(self.field.p());
        let e = self.field.e();
        Some(Self::raw(
            &base,
            self.c0.clone(),
            BigInt::zero(),
            (self.prec + e - 1) / e,
        ))
    }

    /// Embed an element of `Q_p` into `field`.
    pub fn embed(&self, field: &ExtensionField) -> Result<PadicValue> {
        if self.field.degree() != 1 || self.field.p() != field.p() {
            return Err(Error::FieldMismatch);
        }
        Ok(Self::raw(
            field,
            self.c0.clone(),
            BigInt::zero(),
            self.prec * field.e(),
        ))
    }

    /// Equality after reduction to precision `n`.
    pub fn eq_at(&self, other: &Self, n: u32) -> bool {
        let n = n.min(self.prec).min(other.prec);
        self.field == other.field && self.truncate(n) == other.truncate(n)
    }

    /// True when `x − y` vanishes at the common precision.
    pub fn congruent(&self, other: &Self) -> bool {
        self.try_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }

    /// Residue of the first coordinate modulo `p` and of the second.
    pub fn residue(&self) -> (u64, u64) {
        use num_traits::ToPrimitive;
        let p = self.field.p().big();
        let a = modulo(&self.c0, &p).to_u64().unwrap_or(0);
        let b = if self.field.kind() == FieldKind::Unramified {
            modulo(&self.c1, &p).to_u64().unwrap_or(0)
        } else {
            0
        };
        (a, b)
    }
}

impl fmt::Display for PadicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.field.degree() == 1 {
            write!(f, "{} + O({}^{})", self.c0, self.field.p(), self.prec)
        } else {
            write!(f, "{} + {}*g + O(pi^{})", self.c0, self.c1, self.prec)
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&PadicValue> for &PadicValue {
            type Output = PadicValue;
            fn $m(self, rhs: &PadicValue) -> PadicValue {
                self.$try(rhs).expect("field mismatch")
            }
        }
        impl $tr<PadicValue> for PadicValue {
            type Output = PadicValue;
            fn $m(self, rhs: PadicValue) -> PadicValue {
                self.$try(&rhs).expect("field mismatch")
            }
        }
        impl $tr<&PadicValue> for PadicValue {
            type Output = PadicValue;
            fn $m(self, rhs: &PadicValue) -> PadicValue {
                self.$try(rhs).expect("field mismatch")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &PadicValue {
    type Output = PadicValue;
    fn neg(self) -> PadicValue {
        PadicValue::raw(&self.field, -&self.c0, -&self.c1, self.prec)
    }
}

impl Neg for PadicValue {
    type Output = PadicValue;
    fn neg(self) -> PadicValue {
        -&self
    }
}
