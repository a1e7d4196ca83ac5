//! Linear recurrences over `Z_p`: terms, characteristic roots, Binet
//! coefficients and the interpolability class.
//!
//! The recurrence `s(n+ℓ) + a_{ℓ−1} s(n+ℓ−1) + … + a_0 s(n) = 0` has
//! characteristic polynomial `g(x) = x^ℓ + a_{ℓ−1} x^{ℓ−1} + … + a_0`.

mod poly;
mod spectral;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::analytic::q_constant;
use crate::localfield::{ExtensionField, PadicValue};
use crate::prime::{inverse_mod, is_p_integral, modulo, nu_p_rational, rational_residue, Prime};
use crate::{Error, ErrorKind, Result};

pub use spectral::{spectral_decompose, Root, SpectralData, ROOT_SEARCH_LIMIT};

/// Default number of guard digits added to the requested precision.
pub const DEFAULT_GUARD: u32 = 10;

/// A constant-recursive sequence with `p`-integral rational data.
///
/// `precision` is the number of `p`-adic digits requested for results;
/// internal computations use `precision + guard` digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceSpec {
    p: Prime,
    coeffs: Vec<BigRational>,
    initial: Vec<BigRational>,
    precision: u32,
    guard: u32,
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RecurrenceSpec {
    /// `coeffs = [a_0, …, a_{ℓ−1}]`, `initial = [s(0), …, s(ℓ−1)]`.
    pub fn new(
        p: Prime,
        coeffs: Vec<BigRational>,
        initial: Vec<BigRational>,
        precision: u32,
    ) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidRecurrence("order must be at least 1".into()));
        }
        if coeffs.len() != initial.len() {
            return Err(Error::InvalidRecurrence(format!(
                "order {} needs {} initial terms, got {}",
                coeffs.len(),
                coeffs.len(),
                initial.len()
            )));
        }
        if precision == 0 {
            return Err(Error::InvalidArgument("precision must be positive".into()));
        }
        for (what, list) in [("coefficient", &coeffs), ("initial term", &initial)] {
            for x in list {
                if !is_p_integral(x, p) {
                    return Err(Error::InvalidRecurrence(format!(
                        "{what} {x} has a denominator divisible by {p}"
                    )));
                }
            }
        }
        Ok(RecurrenceSpec {
            p,
            coeffs,
            initial,
            precision,
            guard: DEFAULT_GUARD,
        })
    }

    pub fn from_ints(p: u64, coeffs: &[i64], initial: &[i64], precision: u32) -> Result<Self> {
        Self::new(
            Prime::new(p)?,
            coeffs.iter().map(|&c| int(c)).collect(),
            initial.iter().map(|&c| int(c)).collect(),
            precision,
        )
    }

    /// `F(n+2) = F(n+1) + F(n)`, `F(0) = 0`, `F(1) = 1`.
    pub fn fibonacci(p: u64, precision: u32) -> Result<Self> {
        Self::from_ints(p, &[-1, -1], &[0, 1], precision)
    }

    pub fn with_guard(mut self, guard: u32) -> Self {
        self.guard = guard;
        self
    }

    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = precision.max(1);
        self
    }

    pub fn p(&self) -> Prime {
        self.p
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn initial(&self) -> &[BigRational] {
        &self.initial
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// `precision + guard`, in `p`-adic digits.
    pub fn working_precision(&self) -> u32 {
        self.precision + self.guard
    }

    /// `g(x)`, constant term first.
    pub fn char_poly(&self) -> Vec<BigRational> {
        let mut g = self.coeffs.clone();
        g.push(BigRational::one());
        g
    }

    pub fn is_zero_sequence(&self) -> bool {
        self.initial.iter().all(|s| s.is_zero())
    }

    pub fn a0_is_unit(&self) -> bool {
        nu_p_rational(&self.coeffs[0], self.p) == Some(0)
    }

    fn residues(&self, list: &[BigRational], k: u32) -> Vec<BigInt> {
        list.iter()
            .map(|x| rational_residue(x, self.p, k).expect("validated at construction"))
            .collect()
    }

    /// `s(0), …, s(n_max)` modulo `p^k`.
    pub fn terms_mod(&self, n_max: usize, k: u32) -> Vec<BigInt> {
        let m = self.p.pow(k);
        let a = self.residues(&self.coeffs, k);
        let mut s = self.residues(&self.initial, k);
        let l = self.order();
        while s.len() <= n_max {
            let n = s.len() - l;
            let mut acc = BigInt::zero();
            for i in 0..l {
                acc -= &a[i] * &s[n + i];
            }
            s.push(modulo(&acc, &m));
        }
        s.truncate(n_max + 1);
        s
    }

    /// `s(0), …, s(n_max)` at the requested precision.
    pub fn eval_terms(&self, n_max: usize) -> Vec<PadicValue> {
        self.eval_terms_at(n_max, self.precision)
    }

    /// `s(0), …, s(n_max)` at precision `k`.
    pub fn eval_terms_at(&self, n_max: usize, k: u32) -> Vec<PadicValue> {
        let z = ExtensionField::base(self.p);
        self.terms_mod(n_max, k)
            .into_iter()
            .map(|s| PadicValue::from_bigint(&z, s, k))
            .collect()
    }

    /// `s(n)` modulo `p^k` for a possibly huge index, by fast exponentiation
    /// in `Z/p^k[x]/(g)` (the algebra generated by the companion matrix).
    /// Negative indices are allowed when `a_0` is a unit.
    pub fn term_at(&self, n: &BigInt, k: u32) -> Result<PadicValue> {
        let m = self.p.pow(k);
        let l = self.order();
        let a = self.residues(&self.coeffs, k);
        let x = if n.is_negative() {
            if !self.a0_is_unit() {
                return Err(Error::TwoSidedUnavailable);
            }
            // x^{-1} = −(x^{ℓ−1} + a_{ℓ−1} x^{ℓ−2} + … + a_1) / a_0
            let inv = inverse_mod(&a[0], &m).ok_or(Error::NotInvertible)?;
            let mut v = Vec::with_capacity(l);
            for i in 0..l {
                let c = if i + 1 < l {
                    a[i + 1].clone()
                } else {
                    BigInt::one()
                };
                v.push(modulo(&(-(c * &inv)), &m));
            }
            v
        } else {
            let mut v = alloc::vec![BigInt::zero(); l];
            if l == 1 {
                v[0] = modulo(&-&a[0], &m);
            } else {
                v[1] = BigInt::one();
            }
            v
        };
        let e: BigUint = n.magnitude().clone();
        let mut acc = alloc::vec![BigInt::zero(); l];
        acc[0] = BigInt::one();
        for bit in (0..e.bits()).rev() {
            acc = mulmod_poly(&acc, &acc, &a, &m);
            if e.bit(bit) {
                acc = mulmod_poly(&acc, &x, &a, &m);
            }
        }
        let s = self.residues(&self.initial, k);
        let mut total = BigInt::zero();
        for i in 0..l {
            total += &acc[i] * &s[i];
        }
        Ok(PadicValue::from_bigint(
            &ExtensionField::base(self.p),
            total,
            k,
        ))
    }
}

/// Product in `Z/m[x]/(g)` where `g = x^ℓ + Σ a_i x^i`.
fn mulmod_poly(u: &[BigInt], v: &[BigInt], a: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    let l = a.len();
    let mut prod = alloc::vec![BigInt::zero(); 2 * l - 1];
    for (i, x) in u.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in v.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for d in (l..prod.len()).rev() {
        let c = modulo(&prod[d], m);
        if c.is_zero() {
            continue;
        }
        for i in 0..l {
            prod[d - l + i] -= &c * &a[i];
        }
    }
    prod.truncate(l);
    prod.iter().map(|c| modulo(c, m)).collect()
}

impl fmt::Display for RecurrenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s(n+{})", self.order())?;
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let sign = if a.is_negative() { '-' } else { '+' };
            let mag = a.abs();
            if mag.is_one() {
                write!(f, " {sign} s(n+{i})")?;
            } else {
                write!(f, " {sign} {mag}*s(n+{i})")?;
            }
        }
        write!(f, " = 0 over Z_{}", self.p)
    }
}

/// Coarse interpolability class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InterpolabilityTag {
    ExactTwisted,
    ApproximateOnly,
    IdenticallyZero,
}

impl fmt::Display for InterpolabilityTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InterpolabilityTag::ExactTwisted => "ExactTwisted",
            InterpolabilityTag::ApproximateOnly => "ApproximateOnly",
            InterpolabilityTag::IdenticallyZero => "IdenticallyZero",
        })
    }
}

/// Result of [`classify`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpolabilityClass {
    pub tag: InterpolabilityTag,
    /// No unit root carries a nonzero coefficient, so no twisted
    /// interpolation exists.
    pub unit_part_empty: bool,
    pub witness: String,
    pub p: u64,
    /// Ramification index and residue degree of the root field, when known.
    pub e: Option<u32>,
    pub f: Option<u32>,
    pub q: Option<u64>,
}

impl InterpolabilityClass {
    /// `q · max(p^f − 1, 1)`.
    pub fn function_count(&self) -> Option<u64> {
        let f = self.f?;
        Some(self.q? * (self.p.pow(f) - 1).max(1))
    }

    pub fn has_twisted_interpolation(&self) -> bool {
        self.tag != InterpolabilityTag::ApproximateOnly
    }
}

impl fmt::Display for InterpolabilityClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unit_part_empty {
            write!(f, "no twisted interpolation ({})", self.witness)?;
        } else {
            write!(f, "{}", self.tag)?;
            if let Some(n) = self.function_count() {
                write!(f, ", {n} functions")?;
            }
        }
        if let Some(q) = self.q {
            write!(f, ", q={q}")?;
        }
        if let Some(k) = self.f {
            write!(f, ", f={k}")?;
        }
        if let Some(e) = self.e {
            write!(f, ", e={e}")?;
        }
        Ok(())
    }
}

/// Ramification of `g` when it is `(x − r)^ℓ` mod `p` and `g(x + r)` is
/// Eisenstein: then `e = ℓ`, `f = 1`.
fn eisenstein_degree(spec: &RecurrenceSpec) -> Option<u32> {
    let p = spec.p;
    let g = spec.char_poly();
    let l = spec.order();
    for r in 0..p.get().min(ROOT_SEARCH_LIMIT) {
        // coefficients of g(x + r) by repeated synthetic division
        let mut rest = g.clone();
        let mut shifted = Vec::with_capacity(l + 1);
        let rr = int(r as i64);
        for _ in 0..=l {
            let d = rest.len() - 1;
            let mut q = alloc::vec![BigRational::zero(); d];
            let mut carry = rest[d].clone();
            for i in (0..d).rev() {
                q[i] = carry.clone();
                carry = &rest[i] + &carry * &rr;
            }
            shifted.push(carry);
            rest = q;
            if rest.is_empty() {
                break;
            }
        }
        let c0 = nu_p_rational(&shifted[0], p);
        if c0 != Some(1) {
            continue;
        }
        let eis = shifted[1..l]
            .iter()
            .all(|c| c.is_zero() || nu_p_rational(c, p).map(|v| v >= 1).unwrap_or(false));
        if eis {
            return Some(l as u32);
        }
    }
    None
}

/// Decide whether `s` has a twisted interpolation.
pub fn classify(spec: &RecurrenceSpec) -> Result<InterpolabilityClass> {
    let p = spec.p.get();
    let mut class = InterpolabilityClass {
        tag: InterpolabilityTag::ExactTwisted,
        unit_part_empty: false,
        witness: String::new(),
        p,
        e: None,
        f: None,
        q: None,
    };
    if spec.is_zero_sequence() {
        class.tag = InterpolabilityTag::IdenticallyZero;
        class.witness = "all initial terms vanish".into();
        class.e = Some(1);
        class.f = Some(1);
        class.q = Some(q_constant(p, 1));
        return Ok(class);
    }
    let sd = match spectral_decompose(spec) {
        Ok(sd) => Some(sd),
        Err(e) if spec.a0_is_unit() && e.kind() == ErrorKind::Unsupported => None,
        Err(e) => return Err(e),
    };
    if let Some(sd) = &sd {
        class.e = Some(sd.field().e());
        class.f = Some(sd.field().f());
    } else if let Some(e) = eisenstein_degree(spec) {
        class.e = Some(e);
        class.f = Some(1);
    }
    class.q = class.e.map(|e| q_constant(p, e));
    if spec.a0_is_unit() {
        class.witness = "|a_0|_p = 1: every root is a unit".into();
        return Ok(class);
    }
    let sd = sd.expect("non-unit a_0 requires the decomposition");
    let mut unit = false;
    let mut nonunit = Vec::new();
    for (i, r) in sd.roots().iter().enumerate() {
        if !sd.has_nonzero_coefficient(i) {
            continue;
        }
        if r.is_unit() {
            unit = true;
        } else {
            nonunit.push(format!("{}", r.value.valuation()));
        }
    }
    if nonunit.is_empty() {
        class.witness = "only unit roots carry nonzero coefficients".into();
    } else if unit {
        class.tag = InterpolabilityTag::ApproximateOnly;
        class.witness = format!(
            "non-unit roots of valuation {} carry nonzero coefficients",
            nonunit.join(", ")
        );
    } else {
        class.tag = InterpolabilityTag::ApproximateOnly;
        class.unit_part_empty = true;
        class.witness = format!(
            "the sequence is nonzero but only non-unit roots (valuation {}) contribute",
            nonunit.join(", ")
        );
    }
    Ok(class)
}

/// `|x|_p` for values in `p^{Q}`: either zero or `p^{−num/den}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AbsValue {
    Zero,
    /// `p^{−num/den}`, with `num` in `π`-units and `den = e`.
    Power {
        num: i64,
        den: u32,
    },
}

impl fmt::Display for AbsValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AbsValue::Zero => f.write_str("0"),
            AbsValue::Power { num, den } => {
                let g = num_integer::gcd(num.unsigned_abs(), den as u64).max(1) as i64;
                let (a, b) = (-num / g, den as i64 / g);
                if b == 1 {
                    write!(f, "p^{a}")
                } else {
                    write!(f, "p^({a}/{b})")
                }
            }
        }
    }
}

/// `(C, D)` with `|s(n) − Σ_{unit β} c_β(n) β^n|_p ≤ C D^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ErrorConstants {
    pub c: AbsValue,
    pub d: AbsValue,
}

impl ErrorConstants {
    /// Lower bound for `ν(s(n) − unit part)` in `π`-units; `None` means the
    /// difference must vanish.
    pub fn bound_valuation(&self, n: u64) -> Option<i64> {
        match (self.c, self.d) {
            (AbsValue::Power { num: c, .. }, AbsValue::Power { num: d, .. }) => {
                Some(c + n as i64 * d)
            }
            _ => None,
        }
    }
}

/// `C = max_{|β|<1} max_i |c_{β,i}|`, `D = max_{|β|<1} |β|`.
pub fn error_constants(sd: &SpectralData) -> ErrorConstants {
    let e = sd.field().e();
    let mut c: Option<i64> = None;
    let mut d: Option<i64> = None;
    for (i, r) in sd.roots().iter().enumerate() {
        if r.is_unit() {
            continue;
        }
        let v = r.value.valuation().bound() as i64;
        d = Some(d.map_or(v, |x: i64| x.min(v)));
        for k in sd.binet(i) {
            if let Some(v) = k.valuation().exact() {
                c = Some(c.map_or(v, |x: i64| x.min(v)));
            }
        }
    }
    let wrap = |v: Option<i64>| match v {
        Some(num) => AbsValue::Power { num, den: e },
        None => AbsValue::Zero,
    };
    match (c, d) {
        (Some(_), Some(_)) => ErrorConstants {
            c: wrap(c),
            d: wrap(d),
        },
        _ => ErrorConstants {
            c: AbsValue::Zero,
            d: AbsValue::Zero,
        },
    }
}
