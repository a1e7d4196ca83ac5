use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;

use super::{ExtensionField, FieldKind, PadicValue};

/// One `π`-adic digit.
///
/// Digits of `Q_p` and of ramified fields are integers in `[0, p)`; digits of
/// the unramified field are `a + b γ` with `a, b ∈ [0, p)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Digit {
    Int(u64),
    Pair(u64, u64),
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Digit::Int(a) => write!(f, "{a}"),
            Digit::Pair(a, b) => write!(f, "{a}+{b}g"),
        }
    }
}

fn digit_value(field: &ExtensionField, d: Digit, prec: u32) -> PadicValue {
    match d {
        Digit::Int(a) => PadicValue::from_bigint(field, BigInt::from(a), prec),
        Digit::Pair(a, b) => PadicValue::raw(field, BigInt::from(a), BigInt::from(b), prec),
    }
}

/// The first `N` digits of `x = Σ d_i π^i`.
pub fn pi_expansion(x: &PadicValue) -> Vec<Digit> {
    let n = x.precision();
    let field = x.field();
    let mut out = Vec::with_capacity(n as usize);
    let mut rest = x.clone();
    for _ in 0..n {
        let (a, b) = rest.residue();
        let d = if field.kind() == FieldKind::Unramified {
            Digit::Pair(a, b)
        } else {
            Digit::Int(a)
        };
        out.push(d);
        let dv = digit_value(field, d, rest.precision());
        rest = (&rest - &dv)
            .div_pi_pow(1)
            .expect("digit removal leaves a multiple of the uniformizer");
    }
    out
}

/// Inverse of [`pi_expansion`]: `Σ d_i π^i` at precision `digits.len()`.
pub fn reassemble(field: &ExtensionField, digits: &[Digit]) -> PadicValue {
    let n = digits.len() as u32;
    let mut acc = PadicValue::zero(field, 0);
    for d in digits.iter().rev() {
        let prec = acc.precision() + 1;
        acc = &acc.mul_pi_pow(1) + &digit_value(field, *d, prec);
    }
    acc.truncate(n)
}
