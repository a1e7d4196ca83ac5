use super::{FieldKind, PadicValue, Valuation};
use crate::prime::{sqrt_mod, Prime};
use crate::{Error, Result};

/// Horner evaluation; coefficients constant term first.
pub fn eval_poly(coeffs: &[PadicValue], x: &PadicValue) -> PadicValue {
    let mut acc = PadicValue::zero(x.field(), x.precision());
    for c in coeffs.iter().rev() {
        acc = &(&acc * x) + c;
    }
    acc
}

fn derivative(coeffs: &[PadicValue]) -> alloc::vec::Vec<PadicValue> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul_int(i as i64))
        .collect()
}

/// Lift an approximate root `a` of `f` to a root known to the precision of
/// the coefficients of `f` minus `ν(f'(a))`.
///
/// Requires `ν(f(a)) > 2 ν(f'(a))`.
pub fn hensel_lift(f: &[PadicValue], a: &PadicValue) -> Result<PadicValue> {
    let n = f
        .iter()
        .map(|c| c.precision())
        .min()
        .unwrap_or(a.precision());
    let df = derivative(f);
    let mut x = a.lift(n).truncate(n);
    let fx = eval_poly(f, &x);
    let dfx = eval_poly(&df, &x);
    let vd = match dfx.valuation() {
        Valuation::Exact(v) => v,
        bound => {
            return Err(Error::HenselCriterion {
                f_valuation: fx.valuation(),
                derivative_valuation: bound,
            })
        }
    };
    let vf = fx.valuation();
    if vf.bound() <= 2 * vd {
        return Err(Error::HenselCriterion {
            f_valuation: vf,
            derivative_valuation: dfx.valuation(),
        });
    }
    let out = n.saturating_sub(vd);
    // quadratic convergence: the error exponent roughly doubles each step
    for _ in 0..(2 * (32 - n.leading_zeros()) + 8) {
        let fx = eval_poly(f, &x);
        if fx.is_zero() {
            break;
        }
        let dfx = eval_poly(&df, &x);
        let num = fx.div_pi_pow(vd)?;
        let den = dfx.div_pi_pow(vd)?.invert()?;
        let step = &num * &den;
        x = (&x - &step).lift(n);
    }
    Ok(x.truncate(out))
}

/// Square root in `Z_p`.
///
/// For odd `p` the root whose residue is the least of the two is returned;
/// for `p = 2` the root congruent to 1 mod 4 (times the power of 2).
/// The result has precision `N − k` (`N − k − 1` for `p = 2`) where `p^{2k}`
/// is the largest square power dividing the input.
pub fn sqrt(x: &PadicValue) -> Result<PadicValue> {
    if x.field().kind() != FieldKind::Base {
        return Err(Error::UnsupportedExtension(
            "square roots are only implemented in Q_p".into(),
        ));
    }
    let field = x.field().clone();
    let p = field.p();
    let n = x.precision();
    let v = match x.valuation() {
        Valuation::AtLeast(_) => return Ok(PadicValue::zero(&field, n / 2)),
        Valuation::Exact(v) => v,
    };
    if v % 2 == 1 {
        return Err(Error::NotASquare);
    }
    let k = v / 2;
    let u = x.div_pi_pow(v)?;
    let m = u.precision();
    let root = if p.get() == 2 {
        sqrt_unit_two(&u, m)?
    } else {
        sqrt_unit_odd(&u, p, m)?
    };
    Ok(root.mul_pi_pow(k))
}

fn sqrt_unit_odd(u: &PadicValue, p: Prime, m: u32) -> Result<PadicValue> {
    let (r, _) = u.residue();
    let s = sqrt_mod(r, p.get()).ok_or(Error::NotASquare)?;
    let s = s.min(p.get() - s);
    let field = u.field();
    let poly = [-u, PadicValue::zero(field, m), PadicValue::one(field, m)];
    hensel_lift(&poly, &PadicValue::from_int(field, s as i64, m))
}

fn sqrt_unit_two(u: &PadicValue, m: u32) -> Result<PadicValue> {
    use num_traits::ToPrimitive;
    let field = u.field();
    let known = m.min(3);
    let modulus = 1u64 << known;
    let r = (u.coeff(0) % modulus).to_u64().unwrap_or(0);
    if r != 1 % modulus {
        return Err(Error::NotASquare);
    }
    if m <= 1 {
        return Ok(PadicValue::one(field, 0));
    }
    if m <= 3 {
        return Ok(PadicValue::one(field, m - 1));
    }
    let poly = [-u, PadicValue::zero(field, m), PadicValue::one(field, m)];
    let y = hensel_lift(&poly, &PadicValue::one(field, m))?;
    let r4 = (y.coeff(0) % 4u32).to_u64().unwrap_or(1);
    Ok(if r4 == 1 { y } else { -y })
}
