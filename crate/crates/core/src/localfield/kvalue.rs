use core::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use super::{ExtensionField, PadicValue, Valuation};
use crate::prime::nu_p_rational;
use crate::{Error, Result};

/// An element of `K` (not necessarily integral): `π^shift · body`.
///
/// After normalisation `body` is a unit or indistinguishable from zero; the
/// absolute precision is `shift + body.precision()` in `π`-units.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldValue {
    shift: i64,
    body: PadicValue,
}

/// Valuation of a [`FieldValue`] in `π`-units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignedValuation {
    Exact(i64),
    AtLeast(i64),
}

impl SignedValuation {
    pub fn bound(self) -> i64 {
        match self {
            SignedValuation::Exact(v) | SignedValuation::AtLeast(v) => v,
        }
    }

    pub fn exact(self) -> Option<i64> {
        match self {
            SignedValuation::Exact(v) => Some(v),
            SignedValuation::AtLeast(_) => None,
        }
    }
}

impl FieldValue {
    fn normalized(shift: i64, body: PadicValue) -> Self {
        match body.valuation() {
            Valuation::Exact(v) if v > 0 => {
                let body = body.div_pi_pow(v).expect("valuation checked");
                FieldValue {
                    shift: shift + v as i64,
                    body,
                }
            }
            _ => FieldValue { shift, body },
        }
    }

    pub fn from_padic(x: &PadicValue) -> Self {
        Self::normalized(0, x.clone())
    }

    /// `π^shift · body`.
    pub fn from_parts(shift: i64, body: PadicValue) -> Self {
        Self::normalized(shift, body)
    }

    /// A rational number with `rel_prec` `π`-adic digits of relative precision.
    pub fn from_rational(field: &ExtensionField, x: &BigRational, rel_prec: u32) -> Result<Self> {
        if x.is_zero() {
            return Ok(FieldValue {
                shift: 0,
                body: PadicValue::zero(field, rel_prec),
            });
        }
        let p = field.p();
        let v = nu_p_rational(x, p).unwrap_or(0);
        let pv = BigRational::from_integer(p.pow(v.unsigned_abs() as u32));
        let u = if v >= 0 { x / pv } else { x * pv };
        let body = Self::from_padic(&PadicValue::from_rational(field, &u, rel_prec)?);
        if v == 0 {
            return Ok(body);
        }
        let e = field.e();
        let pp = Self::from_padic(&PadicValue::from_int(field, p.get() as i64, rel_prec + e));
        let scale = pp.pow_u64(v.unsigned_abs());
        if v > 0 {
            body.try_mul(&scale)
        } else {
            body.try_div(&scale)
        }
    }

    pub fn zero(field: &ExtensionField, prec: u32) -> Self {
        FieldValue {
            shift: 0,
            body: PadicValue::zero(field, prec),
        }
    }

    pub fn one(field: &ExtensionField, prec: u32) -> Self {
        FieldValue {
            shift: 0,
            body: PadicValue::one(field, prec),
        }
    }

    pub fn field(&self) -> &ExtensionField {
        self.body.field()
    }

    pub fn shift(&self) -> i64 {
        self.shift
    }

    pub fn body(&self) -> &PadicValue {
        &self.body
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }

    /// Absolute precision in `π`-units.
    pub fn abs_precision(&self) -> i64 {
        self.shift + self.body.precision() as i64
    }

    /// Number of significant `π`-adic digits.
    pub fn rel_precision(&self) -> u32 {
        if self.is_zero() {
            0
        } else {
            self.body.precision()
        }
    }

    pub fn valuation(&self) -> SignedValuation {
        if self.is_zero() {
            SignedValuation::AtLeast(self.abs_precision())
        } else {
            SignedValuation::Exact(self.shift)
        }
    }

    /// The value as an element of `O_K` at absolute precision `n`
    /// (defaults to the available precision).
    pub fn to_padic(&self, n: Option<u32>) -> Result<PadicValue> {
        let abs = self.abs_precision();
        if abs < 0 && !self.is_zero() || (self.shift < 0 && !self.is_zero()) {
            return Err(Error::InvalidArgument("value is not integral".into()));
        }
        let target = n.map(|n| (n as i64).min(abs)).unwrap_or(abs).max(0) as u32;
        if self.is_zero() {
            return Ok(PadicValue::zero(self.field(), target));
        }
        Ok(self.body.mul_pi_pow(self.shift as u32).truncate(target))
    }

    /// Truncate to absolute precision `n`.
    pub fn truncate_abs(&self, n: i64) -> Self {
        let rel = n - self.shift;
        if rel >= self.body.precision() as i64 {
            return self.clone();
        }
        if rel <= 0 {
            return FieldValue {
                shift: n,
                body: PadicValue::zero(self.field(), 0),
            };
        }
        Self::normalized(self.shift, self.body.truncate(rel as u32))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.field() != other.field() {
            return Err(Error::FieldMismatch);
        }
        let abs = self.abs_precision().min(other.abs_precision());
        let s = self.shift.min(other.shift);
        let rel = (abs - s).max(0) as u32;
        let a = self.body.mul_pi_pow((self.shift - s) as u32).truncate(rel);
        let b = other
            .body
            .mul_pi_pow((other.shift - s) as u32)
            .truncate(rel);
        Ok(Self::normalized(s, a.try_add(&b)?))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let body = self.body.try_mul(&other.body)?;
        if self.is_zero() || other.is_zero() {
            // absolute precision of a product with an unknown zero
            let abs = if self.is_zero() && other.is_zero() {
                self.abs_precision() + other.abs_precision()
            } else if self.is_zero() {
                self.abs_precision() + other.shift
            } else {
                other.abs_precision() + self.shift
            };
            return Ok(FieldValue {
                shift: abs,
                body: PadicValue::zero(self.field(), 0),
            });
        }
        Ok(Self::normalized(self.shift + other.shift, body))
    }

    pub fn neg(&self) -> Self {
        FieldValue {
            shift: self.shift,
            body: -&self.body,
        }
    }

    pub fn invert(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::NotInvertible);
        }
        Ok(FieldValue {
            shift: -self.shift,
            body: self.body.invert()?,
        })
    }

    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.invert()?)
    }

    pub fn pow_u64(&self, n: u64) -> Self {
        if self.is_zero() {
            return if n == 0 {
                Self::one(self.field(), self.body.precision())
            } else {
                self.clone()
            };
        }
        FieldValue {
            shift: self.shift * n as i64,
            body: self.body.pow_u64(n),
        }
    }

    pub fn conjugate(&self) -> Self {
        Self::normalized(self.shift, self.body.conjugate())
    }

    /// True when `self − other` vanishes at the common precision.
    pub fn congruent(&self, other: &Self) -> bool {
        self.try_sub(other).map(|d| d.is_zero()).unwrap_or(false)
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.body)
        } else {
            write!(f, "pi^{} * ({})", self.shift, self.body)
        }
    }
}
