//! Characteristic roots and Binet coefficients.

use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::poly::squarefree;
use super::RecurrenceSpec;
use crate::localfield::{
    classify_quadratic, eval_poly, hensel_lift, Digit, ExtensionField, FieldKind, FieldValue,
    PadicValue, QuadraticSplitting,
};
use crate::prime::mul_mod;
use crate::{Error, Result};

/// Largest residue field searched exhaustively for simple roots.
pub const ROOT_SEARCH_LIMIT: u64 = 1 << 22;

/// A characteristic root with its multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Root {
    pub value: PadicValue,
    pub multiplicity: u32,
}

impl Root {
    pub fn is_unit(&self) -> bool {
        self.value.is_unit()
    }
}

/// Roots of the characteristic polynomial in one common field, with the
/// coefficient polynomials `c_β` of `s(n) = Σ c_β(n) β^n`.
#[derive(Clone, Debug)]
pub struct SpectralData {
    field: ExtensionField,
    roots: Vec<Root>,
    binet: Vec<Vec<FieldValue>>,
    precision: u32,
}

impl SpectralData {
    pub fn field(&self) -> &ExtensionField {
        &self.field
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Coefficients of `c_β` (constant first) for the `i`-th root.
    pub fn binet(&self, i: usize) -> &[FieldValue] {
        &self.binet[i]
    }

    /// Working precision of the roots, in `π`-units.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn has_nonzero_coefficient(&self, i: usize) -> bool {
        self.binet[i].iter().any(|c| !c.is_zero())
    }

    /// Smallest absolute precision among the Binet coefficients.
    pub fn coefficient_precision(&self) -> i64 {
        self.binet
            .iter()
            .flatten()
            .map(|c| c.abs_precision())
            .min()
            .unwrap_or(self.precision as i64)
    }

    /// `c_β(x)` for the `i`-th root.
    pub fn coefficient_at(&self, i: usize, x: &FieldValue) -> Result<FieldValue> {
        let mut acc = FieldValue::zero(&self.field, self.precision);
        for c in self.binet[i].iter().rev() {
            acc = acc.try_mul(x)?.try_add(c)?;
        }
        Ok(acc)
    }

    fn contribution(&self, i: usize, n: u64) -> Result<FieldValue> {
        let x = FieldValue::from_padic(&PadicValue::from_bigint(
            &self.field,
            BigInt::from(n),
            self.precision,
        ));
        let c = self.coefficient_at(i, &x)?;
        let pow = FieldValue::from_padic(&self.roots[i].value.pow_u64(n));
        c.try_mul(&pow)
    }

    /// `Σ_β c_β(n) β^n`.
    pub fn term(&self, n: u64) -> Result<FieldValue> {
        self.sum_where(n, |_| true)
    }

    /// The contribution of the unit roots only.
    pub fn unit_part(&self, n: u64) -> Result<FieldValue> {
        self.sum_where(n, |r| r.is_unit())
    }

    fn sum_where(&self, n: u64, keep: impl Fn(&Root) -> bool) -> Result<FieldValue> {
        let mut acc = FieldValue::zero(&self.field, self.precision);
        for (i, r) in self.roots.iter().enumerate() {
            if keep(r) && self.has_nonzero_coefficient(i) {
                acc = acc.try_add(&self.contribution(i, n)?)?;
            }
        }
        Ok(acc)
    }
}

fn unsupported(msg: &str) -> Error {
    Error::SplittingFieldUnsupported(msg.into())
}

/// Residues of `h` mod `p` as `u64`.
fn residues_mod_p(h: &[PadicValue], p: u64) -> Vec<u64> {
    h.iter()
        .map(|c| (c.coeff(0) % p).to_u64().unwrap_or(0))
        .collect()
}

fn eval_mod(h: &[u64], x: u64, p: u64) -> u64 {
    h.iter()
        .rev()
        .fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
}

fn derivative_mod(h: &[u64], p: u64) -> Vec<u64> {
    h.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
        .collect()
}

/// Synthetic division of a monic polynomial by `x − r`.
fn deflate(h: &[PadicValue], r: &PadicValue) -> Vec<PadicValue> {
    let d = h.len() - 1;
    let mut out = alloc::vec![PadicValue::zero(r.field(), r.precision()); d];
    let mut carry = h[d].clone();
    for i in (0..d).rev() {
        out[i] = carry.clone();
        carry = &h[i] + &(&carry * r);
    }
    out
}

/// Simple roots of `h` modulo `π`, lifted to the coefficient precision.
fn simple_roots(h: &[PadicValue]) -> Result<Vec<PadicValue>> {
    let field = h[0].field().clone();
    let p = field.p().get();
    let size = field.residue_field_size();
    if size > ROOT_SEARCH_LIMIT {
        return Err(unsupported("residue field too large for root search"));
    }
    let n = h.iter().map(|c| c.precision()).min().unwrap_or(1);
    let mut out = Vec::new();
    if field.kind() == FieldKind::Base {
        let hr = residues_mod_p(h, p);
        let dr = derivative_mod(&hr, p);
        for x in 0..p {
            if eval_mod(&hr, x, p) == 0 && eval_mod(&dr, x, p) != 0 {
                let a = PadicValue::from_bigint(&field, BigInt::from(x), n);
                out.push(hensel_lift(h, &a)?);
            }
        }
        return Ok(out);
    }
    let dh: Vec<PadicValue> = h
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul_int(i as i64))
        .collect();
    let digits: Vec<Digit> = if field.kind() == FieldKind::Unramified {
        (0..p)
            .flat_map(|a| (0..p).map(move |b| Digit::Pair(a, b)))
            .collect()
    } else {
        (0..p).map(Digit::Int).collect()
    };
    for d in digits {
        let a = crate::localfield::reassemble(&field, &[d]).lift(n);
        let fa = eval_poly(h, &a);
        let da = eval_poly(&dh, &a);
        if fa.valuation().bound() >= 1 && da.is_unit() {
            out.push(hensel_lift(h, &a)?);
        }
    }
    Ok(out)
}

/// A quadratic cofactor without simple roots mod `p`.
struct Pending {
    b: BigRational,
    c: BigRational,
    cap: u32,
    mult: u32,
}

/// Roots of the characteristic polynomial and Binet coefficients.
pub fn spectral_decompose(spec: &RecurrenceSpec) -> Result<SpectralData> {
    let p = spec.p();
    let w = spec.working_precision();
    let g = spec.char_poly();
    if g[0].is_zero() {
        return Err(Error::InvalidRecurrence(
            "a_0 = 0: the recurrence has a lower order".into(),
        ));
    }
    let base = ExtensionField::base(p);
    let mut base_roots: Vec<(PadicValue, u32)> = Vec::new();
    let mut pending = Vec::new();
    for (h, mult) in squarefree(&g) {
        let hv = h
            .iter()
            .map(|c| PadicValue::from_rational(&base, c, w))
            .collect::<Result<Vec<_>>>()?;
        let mut rest = hv.clone();
        for r in simple_roots(&hv)? {
            rest = deflate(&rest, &r);
            base_roots.push((r, mult));
        }
        match rest.len() - 1 {
            0 => {}
            1 => base_roots.push((-&rest[0], mult)),
            2 => {
                let cap = rest.iter().map(|c| c.precision()).min().unwrap_or(w);
                pending.push(Pending {
                    b: BigRational::from_integer(rest[1].coeff(0).clone()),
                    c: BigRational::from_integer(rest[0].coeff(0).clone()),
                    cap,
                    mult,
                });
            }
            d => {
                return Err(Error::SplittingFieldUnsupported(format!(
                    "a factor of degree {d} has no simple roots mod p"
                )))
            }
        }
    }

    let mut field = base.clone();
    let mut ext_roots: Vec<(PadicValue, u32)> = Vec::new();
    for Pending { b, c, cap, mult } in pending {
        if field.kind() == FieldKind::Base {
            match classify_quadratic(p, &b, &c, Some(cap), cap)? {
                QuadraticSplitting::Split([r1, r2]) => {
                    base_roots.push((r1, mult));
                    base_roots.push((r2, mult));
                }
                QuadraticSplitting::Field {
                    field: k,
                    root,
                    conjugate,
                } => {
                    field = k;
                    ext_roots.push((root, mult));
                    ext_roots.push((conjugate, mult));
                }
            }
        } else {
            let n = field.max_precision().min(cap * field.e());
            let h = [
                PadicValue::from_rational(&field, &c, n)?,
                PadicValue::from_rational(&field, &b, n)?,
                PadicValue::one(&field, n),
            ];
            let rs = simple_roots(&h)?;
            if rs.len() != 2 {
                return Err(unsupported(
                    "two quadratic factors need different extensions",
                ));
            }
            for r in rs {
                ext_roots.push((r, mult));
            }
        }
    }

    let mut roots = Vec::new();
    for (r, m) in base_roots {
        let value = if field.kind() == FieldKind::Base {
            r
        } else {
            r.embed(&field)?
        };
        roots.push(Root {
            value,
            multiplicity: m,
        });
    }
    for (r, m) in ext_roots {
        roots.push(Root {
            value: r,
            multiplicity: m,
        });
    }
    let precision = roots
        .iter()
        .map(|r| r.value.precision())
        .min()
        .unwrap_or(w * field.e());
    for r in &mut roots {
        r.value = r.value.truncate(precision);
    }
    let binet = solve_binet(spec, &field, &roots, precision)?;
    Ok(SpectralData {
        field,
        roots,
        binet,
        precision,
    })
}

fn solve_binet(
    spec: &RecurrenceSpec,
    field: &ExtensionField,
    roots: &[Root],
    precision: u32,
) -> Result<Vec<Vec<FieldValue>>> {
    let l = spec.order();
    let mut cols: Vec<(usize, u32)> = Vec::new();
    for (i, r) in roots.iter().enumerate() {
        for j in 0..r.multiplicity {
            cols.push((i, j));
        }
    }
    if cols.len() != l {
        return Err(Error::InsufficientPrecision(
            "root multiplicities do not add up to the order".into(),
        ));
    }
    let mut a = Vec::with_capacity(l);
    for n in 0..l as u64 {
        let mut row = Vec::with_capacity(l);
        for &(i, j) in &cols {
            let nj = if j == 0 { 1 } else { n.pow(j) };
            let v = roots[i].value.pow_u64(n).mul_bigint(&BigInt::from(nj));
            row.push(FieldValue::from_padic(&v));
        }
        a.push(row);
    }
    let b = spec
        .initial()
        .iter()
        .map(|s| FieldValue::from_rational(field, s, precision))
        .collect::<Result<Vec<_>>>()?;
    let x = solve(a, b)?;
    let mut out: Vec<Vec<FieldValue>> = roots.iter().map(|_| Vec::new()).collect();
    for (k, &(i, _)) in cols.iter().enumerate() {
        out[i].push(x[k].clone());
    }
    Ok(out)
}

/// Gaussian elimination with minimal-valuation pivots.
pub(crate) fn solve(
    mut a: Vec<Vec<FieldValue>>,
    mut b: Vec<FieldValue>,
) -> Result<Vec<FieldValue>> {
    let n = b.len();
    for k in 0..n {
        let pivot = (k..n)
            .filter(|&i| !a[i][k].is_zero())
            .min_by_key(|&i| a[i][k].valuation().bound())
            .ok_or_else(|| {
                Error::InsufficientPrecision("Binet system is singular at working precision".into())
            })?;
        a.swap(k, pivot);
        b.swap(k, pivot);
        let inv = a[k][k].invert()?;
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = a[i][k].try_mul(&inv)?;
            for j in k..n {
                let t = factor.try_mul(&a[k][j])?;
                a[i][j] = a[i][j].try_sub(&t)?;
            }
            let t = factor.try_mul(&b[k])?;
            b[i] = b[i].try_sub(&t)?;
        }
    }
    let mut x: Vec<FieldValue> = b.clone();
    for k in (0..n).rev() {
        let mut acc = b[k].clone();
        for j in k + 1..n {
            acc = acc.try_sub(&a[k][j].try_mul(&x[j])?)?;
        }
        x[k] = acc.try_div(&a[k][k])?;
    }
    Ok(x)
}
