//! `log_p`, `exp_p`, `sinh_p`, the Teichmüller map and the exponent `q`.
//!
//! Valuations are in `π`-units throughout. Series are truncated using exact
//! `p`-adic valuations of the denominators and summed with enough guard
//! digits that the result is correct to the precision of the input.

use num_bigint::BigInt;

use crate::localfield::{ExtensionField, PadicValue, Valuation};
use crate::prime::{inverse_mod, nu_p_factorial, nu_p_u64};
use crate::{Error, Result};

/// Which series a domain belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Log,
    Exp,
}

/// Domain of convergence of `log_p` or `exp_p` on a given field.
///
/// `Log` accepts `x` with `ν(x − 1) ≥ 1`; `Exp` accepts `x` with
/// `ν(x) > e/(p − 1)`, stored as the rational threshold `num/den`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConvergenceDomain {
    pub kind: DomainKind,
    pub threshold_num: u64,
    pub threshold_den: u64,
}

impl ConvergenceDomain {
    pub fn log() -> Self {
        ConvergenceDomain {
            kind: DomainKind::Log,
            threshold_num: 1,
            threshold_den: 1,
        }
    }

    pub fn exp(field: &ExtensionField) -> Self {
        ConvergenceDomain {
            kind: DomainKind::Exp,
            threshold_num: field.e() as u64,
            threshold_den: field.p().get() - 1,
        }
    }

    /// Whether a value of `π`-valuation `v` (of `x − 1` for `Log`) lies in the
    /// domain.
    pub fn accepts_valuation(&self, v: u64) -> bool {
        match self.kind {
            DomainKind::Log => v >= 1,
            DomainKind::Exp => v * self.threshold_den > self.threshold_num,
        }
    }

    pub fn contains(&self, x: &PadicValue) -> bool {
        let v = match self.kind {
            DomainKind::Log => {
                let one = PadicValue::one(x.field(), x.precision());
                (x - &one).valuation()
            }
            DomainKind::Exp => x.valuation(),
        };
        self.accepts_valuation(v.bound() as u64)
    }
}

/// Divide by the unit `u` (an integer prime to `p`).
fn div_unit(x: &PadicValue, u: u64) -> PadicValue {
    if u == 1 {
        return x.clone();
    }
    let m = x.field().p_pow(x.precision());
    let inv = inverse_mod(&BigInt::from(u), &m).expect("unit");
    x.mul_bigint(&inv)
}

fn floor_log(m: u64, p: u64) -> u32 {
    let mut k = 0;
    let mut acc = p;
    while acc <= m {
        k += 1;
        acc = match acc.checked_mul(p) {
            Some(a) => a,
            None => break,
        };
    }
    k
}

/// `log_p(x) = Σ (−1)^{m+1} (x − 1)^m / m` for `x ∈ 1 + π O_K`.
pub fn log_p(x: &PadicValue) -> Result<PadicValue> {
    let field = x.field();
    let n = x.precision();
    let p = field.p().get();
    let e = field.e() as u64;
    let one = PadicValue::one(field, n);
    let y = x - &one;
    let t = match y.valuation() {
        Valuation::AtLeast(_) => return Ok(PadicValue::zero(field, n)),
        Valuation::Exact(0) => return Err(Error::OutsideLogDomain),
        Valuation::Exact(t) => t as u64,
    };
    // last index whose term can still be nonzero mod π^n
    let mut m_max = 1u64;
    loop {
        let m = m_max + 1;
        if m >= 3 && m * t >= n as u64 + e * floor_log(m, p) as u64 {
            break;
        }
        m_max = m;
    }
    let guard = (e as u32) * floor_log(m_max, p);
    let w = n + guard;
    let y = y.lift(w);
    let mut power = y.clone();
    let mut sum = PadicValue::zero(field, w);
    for m in 1..=m_max {
        if m > 1 {
            power = &power * &y;
        }
        let k = nu_p_u64(m, p);
        let mut term = power
            .div_p_pow(k)
            .expect("valuation of (x-1)^m exceeds that of m");
        term = div_unit(&term, m / p.pow(k));
        sum = if m % 2 == 1 {
            &sum + &term
        } else {
            &sum - &term
        };
    }
    Ok(sum.truncate(n))
}

/// `exp_p(x) = Σ x^m / m!` for `ν(x) > e/(p − 1)`.
pub fn exp_p(x: &PadicValue) -> Result<PadicValue> {
    let field = x.field();
    let n = x.precision();
    let p = field.p().get();
    let e = field.e() as u64;
    let v = match x.valuation() {
        Valuation::AtLeast(_) => return Ok(PadicValue::one(field, n)),
        Valuation::Exact(v) => v as u64,
    };
    if !ConvergenceDomain::exp(field).accepts_valuation(v) {
        return Err(Error::OutsideExpDomain);
    }
    // ν(x^m/m!) ≥ m v − e (m − 1)/(p − 1), increasing in m
    let mut m_max = 0u64;
    loop {
        let m = m_max + 1;
        if m * v * (p - 1) >= n as u64 * (p - 1) + e * (m - 1) {
            break;
        }
        m_max = m;
    }
    let guard = (e * nu_p_factorial(m_max, p)) as u32;
    let w = n + guard;
    let x = x.lift(w);
    let mut term = PadicValue::one(field, w);
    let mut sum = term.clone();
    for m in 1..=m_max {
        let k = nu_p_u64(m, p);
        term = (&term * &x).div_p_pow(k).expect("x^m/m! is integral");
        term = div_unit(&term, m / p.pow(k));
        sum = &sum + &term;
    }
    Ok(sum.truncate(n))
}

/// `(exp_p(x) − exp_p(−x)) / 2`, for odd `p`.
pub fn sinh_p(x: &PadicValue) -> Result<PadicValue> {
    if x.field().p().get() == 2 {
        return Err(Error::SinhAtTwo);
    }
    let a = exp_p(x)?;
    let b = exp_p(&-x)?;
    Ok(div_unit(&(&a - &b), 2))
}

/// The `(p^f − 1)`-st root of unity congruent to the unit `x` mod `π`.
pub fn teichmuller(x: &PadicValue) -> Result<PadicValue> {
    if !x.is_unit() {
        return Err(Error::NoTeichmullerLift);
    }
    let q = x.field().residue_field_size();
    let mut y = x.clone();
    for _ in 0..=x.precision() + 1 {
        let next = y.pow_u64(q);
        if next == y {
            return Ok(y);
        }
        y = next;
    }
    Ok(y)
}

/// Smallest power `q` of `p` with `(β/ω(β))^q` in the domain of `exp_p` for
/// every unit `β` of a field with ramification index `e`.
pub fn q_constant(p: u64, e: u32) -> u64 {
    if (e as u64) < p - 1 {
        return 1;
    }
    let mut q = 1u64;
    while q < e as u64 + 1 {
        q *= p;
    }
    q
}

/// Verify that `(β/ω(β))^q − 1` lies in the domain of `exp_p`.
///
/// Returns the verdict together with the valuation of `(β/ω(β))^q − 1`.
pub fn check_general_domain(beta: &PadicValue, q: u64) -> Result<(bool, Valuation)> {
    let w = teichmuller(beta)?;
    let ratio = (beta * &w.invert()?).pow_u64(q);
    let one = PadicValue::one(beta.field(), beta.precision());
    let v = (&ratio - &one).valuation();
    let ok = ConvergenceDomain::exp(beta.field()).accepts_valuation(v.bound() as u64);
    Ok((ok, v))
}

/// `log_p((β/ω(β))^q)`.
pub fn twisted_log(beta: &PadicValue, q: u64) -> Result<PadicValue> {
    let w = teichmuller(beta)?;
    let ratio = (beta * &w.invert()?).pow_u64(q);
    log_p(&ratio)
}
