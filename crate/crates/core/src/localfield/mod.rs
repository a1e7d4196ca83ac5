//! Capped-precision arithmetic in `Z_p` and in quadratic extensions of `Q_p`.
//!
//! Every extension is presented as `Z_p[γ]` where `γ` has a monic minimal
//! polynomial `x² + B x + C` and `Z_p[γ]` is the full ring of integers:
//!
//! * unramified: the reduction of `x² + Bx + C` is irreducible mod `p`,
//!   the uniformizer is `p`;
//! * ramified: `x² + Bx + C` is Eisenstein, `γ` itself is the uniformizer.
//!
//! A user supplied modulus is brought to one of these normal forms by
//! translations and rescalings of its root; the position of the original root
//! in the new basis is kept so that it can be handed back as an element.

mod digits;
mod hensel;
mod kvalue;
mod value;

use alloc::borrow::Cow;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub use digits::{pi_expansion, reassemble, Digit};
pub use hensel::{eval_poly, hensel_lift, sqrt};
pub use kvalue::{FieldValue, SignedValuation};
pub use value::PadicValue;

use crate::prime::{is_quadratic_residue, rational_residue, Prime};
use crate::{Error, Result};

/// Precision used for residues of non-integral normal-form coefficients.
pub const DEFAULT_CAP: u32 = 256;

const POW_CACHE: u32 = 160;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    /// `Q_p` itself.
    Base,
    /// `e = 1`, `f = 2`.
    Unramified,
    /// `e = 2`, `f = 1`.
    Ramified,
}

/// A `π`-adic valuation report.
///
/// Values are in `π`-units, i.e. `e · ν_p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Valuation {
    Exact(u32),
    /// Indistinguishable from zero at the given precision.
    AtLeast(u32),
}

impl Valuation {
    pub fn exact(self) -> Option<u32> {
        match self {
            Valuation::Exact(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }

    /// Lower bound in `π`-units (exact value or the precision bound).
    pub fn bound(self) -> u32 {
        match self {
            Valuation::Exact(v) | Valuation::AtLeast(v) => v,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Valuation::Exact(_))
    }

    /// The valuation in `p`-units as a fraction `(numerator, e)`.
    pub fn p_units(self, e: u32) -> (u32, u32) {
        (self.bound(), e)
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Exact(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

pub(crate) struct FieldData {
    p: Prime,
    kind: FieldKind,
    gen_b: BigInt,
    gen_c: BigInt,
    /// `Some(k)`: the normal-form coefficients are only known mod `p^k`.
    cap: Option<u32>,
    /// Monic modulus the field was built from, constant term first.
    modulus: Vec<BigRational>,
    /// Root of `modulus` as `u + v γ`.
    root: (BigRational, BigRational),
    powers: Vec<BigInt>,
}

impl fmt::Debug for FieldData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionField")
            .field("p", &self.p)
            .field("kind", &self.kind)
            .field("gen_b", &self.gen_b)
            .field("gen_c", &self.gen_c)
            .field("cap", &self.cap)
            .finish()
    }
}

/// Descriptor of `K / Q_p` with `[K : Q_p] ≤ 2`.
#[derive(Clone, Debug)]
pub struct ExtensionField(Arc<FieldData>);

impl PartialEq for ExtensionField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.kind == other.0.kind
                && self.0.gen_b == other.0.gen_b
                && self.0.gen_c == other.0.gen_c
                && self.0.cap == other.0.cap)
    }
}

impl Eq for ExtensionField {}

fn powers_of(p: Prime, n: u32) -> Vec<BigInt> {
    let mut v = Vec::with_capacity(n as usize + 1);
    let mut acc = BigInt::one();
    let pb = p.big();
    for _ in 0..=n {
        v.push(acc.clone());
        acc *= &pb;
    }
    v
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ExtensionField {
    /// `Q_p` itself.
    pub fn base(p: Prime) -> Self {
        Self::base_with_root(p, BigRational::zero())
    }

    fn base_with_root(p: Prime, c: BigRational) -> Self {
        ExtensionField(Arc::new(FieldData {
            p,
            kind: FieldKind::Base,
            gen_b: BigInt::zero(),
            gen_c: BigInt::zero(),
            cap: None,
            modulus: alloc::vec![-c.clone(), BigRational::one()],
            root: (c, BigRational::zero()),
            powers: powers_of(p, POW_CACHE),
        }))
    }

    fn quadratic(
        p: Prime,
        kind: FieldKind,
        b: &BigRational,
        c: &BigRational,
        cap: Option<u32>,
        modulus: Vec<BigRational>,
        root: (BigRational, BigRational),
    ) -> Result<Self> {
        let (gen_b, gen_c, cap) = match cap {
            None if b.is_integer() && c.is_integer() => (b.to_integer(), c.to_integer(), None),
            None => (
                rational_residue(b, p, DEFAULT_CAP)?,
                rational_residue(c, p, DEFAULT_CAP)?,
                Some(DEFAULT_CAP),
            ),
            Some(k) => (
                rational_residue(b, p, k)?,
                rational_residue(c, p, k)?,
                Some(k),
            ),
        };
        Ok(ExtensionField(Arc::new(FieldData {
            p,
            kind,
            gen_b,
            gen_c,
            cap,
            modulus,
            root,
            powers: powers_of(p, POW_CACHE),
        })))
    }

    pub fn p(&self) -> Prime {
        self.0.p
    }

    pub fn kind(&self) -> FieldKind {
        self.0.kind
    }

    pub fn degree(&self) -> u32 {
        match self.0.kind {
            FieldKind::Base => 1,
            _ => 2,
        }
    }

    /// Ramification index.
    pub fn e(&self) -> u32 {
        match self.0.kind {
            FieldKind::Ramified => 2,
            _ => 1,
        }
    }

    /// Residue degree.
    pub fn f(&self) -> u32 {
        match self.0.kind {
            FieldKind::Unramified => 2,
            _ => 1,
        }
    }

    /// Size of the residue field, `p^f`.
    pub fn residue_field_size(&self) -> u64 {
        self.0.p.get().pow(self.f())
    }

    /// Minimal polynomial `x² + Bx + C` of the basis generator (constant first).
    pub fn generator_poly(&self) -> [BigInt; 2] {
        [self.0.gen_c.clone(), self.0.gen_b.clone()]
    }

    pub fn modulus(&self) -> &[BigRational] {
        &self.0.modulus
    }

    /// Largest supported precision in `π`-units.
    pub fn max_precision(&self) -> u32 {
        match self.0.cap {
            None => u32::MAX / 4,
            Some(k) => k.saturating_mul(self.e()),
        }
    }

    pub(crate) fn gen_b(&self) -> &BigInt {
        &self.0.gen_b
    }

    pub(crate) fn gen_c(&self) -> &BigInt {
        &self.0.gen_c
    }

    /// `p^k`.
    pub fn p_pow(&self, k: u32) -> Cow<'_, BigInt> {
        match self.0.powers.get(k as usize) {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(self.0.p.pow(k)),
        }
    }

    /// Exponents `(k0, k1)` such that an element known mod `π^n` has its
    /// coordinates known mod `p^k0` and `p^k1`.
    pub(crate) fn coord_exponents(&self, n: u32) -> (u32, u32) {
        match self.0.kind {
            FieldKind::Base => (n, 0),
            FieldKind::Unramified => (n, n),
            FieldKind::Ramified => ((n + 1) / 2, n / 2),
        }
    }

    /// A uniformizer at precision `n`: `p` when `e = 1`, the generator when
    /// ramified.
    pub fn uniformizer(&self, n: u32) -> PadicValue {
        match self.0.kind {
            FieldKind::Ramified => PadicValue::generator(self, n),
            _ => PadicValue::from_int(self, self.0.p.get() as i64, n),
        }
    }

    /// The root of the modulus the field was built from.
    pub fn modulus_root(&self, n: u32) -> Result<PadicValue> {
        let (u, v) = &self.0.root;
        let u = PadicValue::from_rational(self, u, n)?;
        if self.degree() == 1 {
            return Ok(u);
        }
        let v = PadicValue::from_rational(self, v, n)?;
        Ok(&u + &(&v * &PadicValue::generator(self, n)))
    }

    /// True if `other` is the same field (structurally).
    pub fn same(&self, other: &ExtensionField) -> bool {
        self == other
    }
}

impl fmt::Display for ExtensionField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0.kind {
            FieldKind::Base => write!(f, "Q_{}", self.0.p),
            k => write!(
                f,
                "Q_{}[g]/(g^2 + {} g + {}) ({})",
                self.0.p,
                self.0.gen_b,
                self.0.gen_c,
                if k == FieldKind::Ramified {
                    "ramified"
                } else {
                    "unramified"
                }
            ),
        }
    }
}

/// Outcome of normalising a monic quadratic over `Z_p`.
#[derive(Debug, Clone)]
pub enum QuadraticSplitting {
    /// Irreducible over `Q_p`; `root` is one of its roots in `field`.
    Field {
        field: ExtensionField,
        root: PadicValue,
        conjugate: PadicValue,
    },
    /// Two roots in `Z_p`.
    Split([PadicValue; 2]),
}

/// Valuation of a value known exactly (`cap = None`) or modulo `p^cap`.
fn capped_nu(x: &BigRational, p: Prime, cap: Option<u32>) -> Result<Option<i64>> {
    if x.is_zero() {
        return match cap {
            None => Ok(None),
            Some(k) => Err(Error::InsufficientPrecision(format!(
                "quadratic normal form undecided at precision p^{k}"
            ))),
        };
    }
    let v = crate::prime::nu_p_rational(x, p).unwrap_or(0);
    if let Some(k) = cap {
        if v >= k as i64 {
            return Err(Error::InsufficientPrecision(format!(
                "quadratic normal form undecided at precision p^{k}"
            )));
        }
    }
    Ok(Some(v))
}

fn reduce_capped(x: BigRational, p: Prime, cap: Option<u32>) -> Result<BigRational> {
    match cap {
        None => Ok(x),
        Some(k) => Ok(BigRational::from_integer(rational_residue(&x, p, k)?)),
    }
}

fn residue_u64(x: &BigRational, p: Prime) -> Result<u64> {
    Ok(rational_residue(x, p, 1)?.to_u64().unwrap_or(0))
}

/// Bring `x² + b x + c` to normal form.
///
/// `cap = None` means `b` and `c` are exact rationals; otherwise they are
/// residues known modulo `p^cap`. `root_prec` is the precision (in `p`-units)
/// of roots returned in the split case for exact input.
pub fn classify_quadratic(
    p: Prime,
    b: &BigRational,
    c: &BigRational,
    cap: Option<u32>,
    root_prec: u32,
) -> Result<QuadraticSplitting> {
    let modulus = alloc::vec![c.clone(), b.clone(), BigRational::one()];
    let two = rat(2);
    if p.get() != 2 {
        let disc = reduce_capped(b * b - rat(4) * c, p, cap)?;
        let v = match capped_nu(&disc, p, cap)? {
            None => {
                return Err(Error::UnsupportedExtension(
                    "modulus is the square of a linear polynomial".into(),
                ))
            }
            Some(v) => v,
        };
        let k = (v / 2) as u32;
        let pk = BigRational::from_integer(p.pow(k));
        let d = &disc / (&pk * &pk);
        let inner_cap = cap.map(|m| m - 2 * k);
        let d = reduce_capped(d, p, inner_cap)?;
        let u = -b / &two;
        let w = &pk / &two;
        if v % 2 == 0 {
            let d0 = residue_u64(&d, p)?;
            if is_quadratic_residue(d0, p.get()) {
                let prec = inner_cap.unwrap_or(root_prec);
                let base = ExtensionField::base(p);
                let sd = sqrt(&PadicValue::from_rational(&base, &d, prec)?)?;
                let uu = PadicValue::from_rational(&base, &u, prec)?;
                let ww = PadicValue::from_rational(&base, &w, prec)?;
                let r1 = &uu + &(&ww * &sd);
                let r2 = &uu - &(&ww * &sd);
                return Ok(QuadraticSplitting::Split([r1, r2]));
            }
            let field = ExtensionField::quadratic(
                p,
                FieldKind::Unramified,
                &BigRational::zero(),
                &-d,
                inner_cap,
                modulus,
                (u, w),
            )?;
            return finish_field(field, root_prec);
        }
        let field = ExtensionField::quadratic(
            p,
            FieldKind::Ramified,
            &BigRational::zero(),
            &-d,
            inner_cap,
            modulus,
            (u, w),
        )?;
        return finish_field(field, root_prec);
    }

    // p = 2: translate by the double root mod 2 and rescale until the
    // polynomial is irreducible mod 2 or Eisenstein.
    let mut bb = reduce_capped(b.clone(), p, cap)?;
    let mut cc = reduce_capped(c.clone(), p, cap)?;
    let mut cap = cap;
    let mut u = BigRational::zero();
    let mut w = BigRational::one();
    for _ in 0..64 {
        let b0 = residue_u64(&bb, p)?;
        let c0 = residue_u64(&cc, p)?;
        match (b0, c0) {
            (1, 1) => {
                let field = ExtensionField::quadratic(
                    p,
                    FieldKind::Unramified,
                    &bb,
                    &cc,
                    cap,
                    modulus,
                    (u, w),
                )?;
                return finish_field(field, root_prec);
            }
            (1, 0) => {
                let prec = cap.unwrap_or(root_prec);
                let base = ExtensionField::base(p);
                let poly = [
                    PadicValue::from_rational(&base, &cc, prec)?,
                    PadicValue::from_rational(&base, &bb, prec)?,
                    PadicValue::one(&base, prec),
                ];
                let uu = PadicValue::from_rational(&base, &u, prec)?;
                let ww = PadicValue::from_rational(&base, &w, prec)?;
                let mut roots = Vec::new();
                for a in [0, 1] {
                    let r = hensel_lift(&poly, &PadicValue::from_int(&base, a, prec))?;
                    roots.push(&uu + &(&ww * &r));
                }
                let r2 = roots.pop().unwrap();
                let r1 = roots.pop().unwrap();
                return Ok(QuadraticSplitting::Split([r1, r2]));
            }
            _ => {}
        }
        // x² + c0 = (x + c0)² mod 2
        let r = rat(c0 as i64);
        let nb = &bb + &two * &r;
        let nc = &r * &r + &bb * &r + &cc;
        u += &w * &r;
        bb = reduce_capped(nb, p, cap)?;
        cc = reduce_capped(nc, p, cap)?;
        let vc = match capped_nu(&cc, p, cap)? {
            None => return Err(Error::SplitModulus),
            Some(v) => v,
        };
        if vc == 1 {
            let field =
                ExtensionField::quadratic(p, FieldKind::Ramified, &bb, &cc, cap, modulus, (u, w))?;
            return finish_field(field, root_prec);
        }
        // both coefficients even, c divisible by 4: substitute x = 2y
        bb /= &two;
        cc /= rat(4);
        w *= &two;
        cap = cap.map(|k| k.saturating_sub(2));
        if cap == Some(0) {
            return Err(Error::InsufficientPrecision(
                "quadratic normal form undecided".into(),
            ));
        }
        bb = reduce_capped(bb, p, cap)?;
        cc = reduce_capped(cc, p, cap)?;
    }
    Err(Error::UnsupportedExtension(
        "2-adic normal form not reached".into(),
    ))
}

fn finish_field(field: ExtensionField, root_prec: u32) -> Result<QuadraticSplitting> {
    let n = (root_prec.saturating_mul(field.e())).min(field.max_precision());
    let root = field.modulus_root(n)?;
    // the two roots sum to -b
    let b = PadicValue::from_rational(&field, &field.modulus()[1], n)?;
    let conjugate = &(-&b) - &root;
    Ok(QuadraticSplitting::Field {
        field,
        root,
        conjugate,
    })
}

/// Build `K = Q_p[x]/(modulus)` from a monic modulus of degree 1 or 2
/// (constant term first).
pub fn build_extension(p: Prime, modulus: &[BigRational]) -> Result<ExtensionField> {
    match modulus.len() {
        2 | 3 if modulus.last().map(|c| c.is_one()) != Some(true) => {
            Err(Error::InvalidArgument("modulus must be monic".into()))
        }
        2 => {
            let c = -modulus[0].clone();
            if !crate::prime::is_p_integral(&c, p) {
                return Err(Error::InvalidArgument("modulus is not p-integral".into()));
            }
            Ok(ExtensionField::base_with_root(p, c))
        }
        3 => {
            for c in modulus {
                if !crate::prime::is_p_integral(c, p) {
                    return Err(Error::InvalidArgument("modulus is not p-integral".into()));
                }
            }
            match classify_quadratic(p, &modulus[1], &modulus[0], None, 32)? {
                QuadraticSplitting::Field { field, .. } => Ok(field),
                QuadraticSplitting::Split(_) => Err(Error::SplitModulus),
            }
        }
        _ => Err(Error::UnsupportedExtension(
            "only moduli of degree 1 or 2 are supported".into(),
        )),
    }
}
