//! Twisted interpolation of a recurrence and `p`-adic limits of its
//! subsequences `s(a p^{fn} + b)`.
//!
//! For a unit root `β` with Teichmüller representative `ω = ω(β)` and
//! `Λ = log_p((β/ω)^q)`, the interpolant attached to `(i, r)` is
//!
//! ```text
//! s_{i,r}(q x + r) = Σ_{|β| = 1} c_β(q x + r) ω^{i−r} β^r exp_p(x Λ)
//! ```
//!
//! which agrees with `s(n)` on `n ≡ i mod p^f − 1`, `n ≡ r mod q`, up to the
//! contribution of the non-unit roots.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::analytic::{exp_p, q_constant, teichmuller, twisted_log, ConvergenceDomain};

use crate::localfield::{eval_poly, ExtensionField, FieldValue, PadicValue, SignedValuation};
use crate::recurrence::{
    error_constants, spectral_decompose, ErrorConstants, RecurrenceSpec, SpectralData,
};
use crate::{Error, Result};

/// The pair `(i, r)` with `0 ≤ i < max(p^f − 1, 1)` and `0 ≤ r < q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ResidueIndex {
    pub i: u64,
    pub r: u64,
}

/// Data attached to one unit root.
#[derive(Clone, Debug)]
pub struct UnitRoot {
    /// Position among the roots of the spectral data.
    pub root: usize,
    pub beta: PadicValue,
    pub omega: PadicValue,
    /// `log_p((β/ω)^q)`.
    pub lambda: PadicValue,
}

/// The family `{s_{i,r}}` attached to a recurrence.
#[derive(Clone, Debug)]
pub struct TwistedInterpolation {
    spec: RecurrenceSpec,
    sd: SpectralData,
    q: u64,
    f: u32,
    units: Vec<UnitRoot>,
    constants: ErrorConstants,
}

impl TwistedInterpolation {
    /// Decompose `spec` and attach Teichmüller data and logarithms to its
    /// unit roots.
    pub fn build(spec: &RecurrenceSpec) -> Result<Self> {
        let sd = spectral_decompose(spec)?;
        let field = sd.field().clone();
        let q = q_constant(field.p().get(), field.e());
        let domain = ConvergenceDomain::exp(&field);
        let mut units = Vec::new();
        for (k, r) in sd.roots().iter().enumerate() {
            if !r.is_unit() {
                continue;
            }
            let omega = teichmuller(&r.value)?;
            let lambda = twisted_log(&r.value, q)?;
            if !lambda.is_zero() && !domain.accepts_valuation(lambda.valuation().bound() as u64) {
                return Err(Error::OutsideExpDomain);
            }
            units.push(UnitRoot {
                root: k,
                beta: r.value.clone(),
                omega,
                lambda,
            });
        }
        let constants = error_constants(&sd);
        Ok(TwistedInterpolation {
            spec: spec.clone(),
            sd,
            q,
            f: field.f(),
            units,
            constants,
        })
    }

    pub fn spec(&self) -> &RecurrenceSpec {
        &self.spec
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.sd
    }

    pub fn field(&self) -> &ExtensionField {
        self.sd.field()
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn f(&self) -> u32 {
        self.f
    }

    pub fn units(&self) -> &[UnitRoot] {
        &self.units
    }

    pub fn error_constants(&self) -> ErrorConstants {
        self.constants
    }

    /// `max(p^f − 1, 1)`.
    pub fn period(&self) -> u64 {
        (self.field().residue_field_size() - 1).max(1)
    }

    pub fn function_count(&self) -> u64 {
        self.q * self.period()
    }

    /// All indices, sorted by `(i, r)`.
    pub fn indices(&self) -> Vec<ResidueIndex> {
        let mut v = Vec::new();
        for i in 0..self.period() {
            for r in 0..self.q {
                v.push(ResidueIndex { i, r });
            }
        }
        v
    }

    /// The index whose progression contains `n`.
    pub fn index_of(&self, n: &BigInt) -> ResidueIndex {
        let i = n.mod_floor(&BigInt::from(self.period())).to_u64().unwrap();
        let r = n.mod_floor(&BigInt::from(self.q)).to_u64().unwrap();
        ResidueIndex { i, r }
    }

    /// True when no root outside the unit group carries a nonzero coefficient.
    pub fn all_units(&self) -> bool {
        self.sd
            .roots()
            .iter()
            .enumerate()
            .all(|(k, r)| r.is_unit() || !self.sd.has_nonzero_coefficient(k))
    }

    fn omega_pow(&self, u: &UnitRoot, k: &BigInt) -> PadicValue {
        let e = k.mod_floor(&BigInt::from(self.period())).to_u64().unwrap();
        u.omega.pow_u64(e)
    }

    fn beta_pow(&self, u: &UnitRoot, k: &BigInt) -> Result<PadicValue> {
        let m = k.magnitude();
        let v = u.beta.pow_big(m);
        if k.is_negative() {
            v.invert()
        } else {
            Ok(v)
        }
    }

    /// `s_{i,r}(q x + r)` for `x ∈ Z_p`.
    pub fn eval(&self, idx: ResidueIndex, x: &PadicValue) -> Result<FieldValue> {
        let field = self.field();
        let n = self.sd.precision();
        let x = if x.field() == field {
            x.clone()
        } else {
            x.embed(field)?
        };
        let x = x.lift(n).truncate(n);
        let arg = &x.mul_int(self.q as i64) + &PadicValue::from_int(field, idx.r as i64, n);
        let arg = FieldValue::from_padic(&arg);
        let shift = BigInt::from(idx.i) - BigInt::from(idx.r);
        let r = BigInt::from(idx.r);
        let mut acc = FieldValue::zero(field, n);
        for u in &self.units {
            if !self.sd.has_nonzero_coefficient(u.root) {
                continue;
            }
            let c = self.sd.coefficient_at(u.root, &arg)?;
            let ex = exp_p(&(&x * &u.lambda))?;
            let t = &(&self.omega_pow(u, &shift) * &self.beta_pow(u, &r)?) * &ex;
            acc = acc.try_add(&c.try_mul(&FieldValue::from_padic(&t))?)?;
        }
        Ok(acc)
    }

    /// `s_{i(n),r(n)}(n)` for a non-negative integer `n`.
    pub fn eval_at_index(&self, n: u64) -> Result<FieldValue> {
        let nb = BigInt::from(n);
        let idx = self.index_of(&nb);
        let x = (n - idx.r) / self.q;
        let z = ExtensionField::base(self.field().p());
        self.eval(
            idx,
            &PadicValue::from_bigint(&z, BigInt::from(x), self.sd.precision()),
        )
    }

    /// `lim_{n→∞} s(a p^{fn} + b) = Σ_{|β|=1} c_β(b) ω(β)^a β^b`.
    pub fn padic_limit(&self, a: &BigInt, b: &BigInt) -> Result<FieldValue> {
        let all_units = self.all_units();
        if !all_units && b.is_negative() {
            return Err(Error::TwoSidedUnavailable);
        }
        if !all_units && a < &BigInt::one() {
            return Err(Error::InvalidArgument(
                "a must be positive when non-unit roots contribute".into(),
            ));
        }
        let field = self.field();
        let n = self.sd.precision();
        let bx = FieldValue::from_padic(&PadicValue::from_bigint(field, b.clone(), n));
        let mut acc = FieldValue::zero(field, n);
        for u in &self.units {
            if !self.sd.has_nonzero_coefficient(u.root) {
                continue;
            }
            let c = self.sd.coefficient_at(u.root, &bx)?;
            let t = &self.omega_pow(u, a) * &self.beta_pow(u, b)?;
            acc = acc.try_add(&c.try_mul(&FieldValue::from_padic(&t))?)?;
        }
        Ok(acc)
    }

    /// Compare `s(n)` with its interpolant for `n ≤ n_max`.
    pub fn agreement_report(&self, n_max: u64) -> Result<AgreementReport> {
        let field = self.field();
        let w = self.spec.working_precision();
        let terms = self.spec.eval_terms_at(n_max as usize, w);
        let mut rows = Vec::with_capacity(terms.len());
        for (n, s) in terms.iter().enumerate() {
            let n = n as u64;
            let s = FieldValue::from_padic(&s.embed(field)?);
            let v = self.eval_at_index(n)?;
            let diff = s.try_sub(&v)?;
            let bound = self.constants.bound_valuation(n);
            let got = diff.valuation();
            let within = match bound {
                None => diff.is_zero(),
                Some(b) => got.bound() >= b.min(diff.abs_precision()),
            };
            rows.push(AgreementRow {
                n,
                index: self.index_of(&BigInt::from(n)),
                difference: got,
                bound,
                within_bound: within,
                exact: diff.is_zero(),
            });
        }
        Ok(AgreementReport { rows })
    }
}

/// One line of an [`AgreementReport`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreementRow {
    pub n: u64,
    pub index: ResidueIndex,
    /// `ν(s(n) − s_{i,r}(n))` in `π`-units.
    pub difference: SignedValuation,
    /// `ν(C D^n)` in `π`-units; `None` when `C = 0`.
    pub bound: Option<i64>,
    pub within_bound: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AgreementReport {
    pub rows: Vec<AgreementRow>,
}

impl AgreementReport {
    pub fn all_within_bound(&self) -> bool {
        self.rows.iter().all(|r| r.within_bound)
    }

    pub fn all_exact(&self) -> bool {
        self.rows.iter().all(|r| r.exact)
    }
}

/// Whether `poly(value) ≡ 0` at the precision of `value` (coefficients
/// constant first).
pub fn verify_algebraic(value: &PadicValue, poly: &[BigInt]) -> bool {
    let field = value.field();
    let n = value.precision();
    let coeffs: Vec<PadicValue> = poly
        .iter()
        .map(|c| PadicValue::from_bigint(field, c.clone(), n))
        .collect();
    if coeffs.iter().all(|c| c.is_zero()) {
        return true;
    }
    eval_poly(&coeffs, value).is_zero()
}
