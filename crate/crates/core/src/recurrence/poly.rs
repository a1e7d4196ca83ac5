//! Dense polynomials over `Q`, constant term first.

use alloc::vec::Vec;

use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) type QPoly = Vec<BigRational>;

pub(crate) fn trim(mut a: QPoly) -> QPoly {
    while a.last().map(|c| c.is_zero()).unwrap_or(false) {
        a.pop();
    }
    a
}

pub(crate) fn degree(a: &QPoly) -> usize {
    a.len().saturating_sub(1)
}

pub(crate) fn derivative(a: &QPoly) -> QPoly {
    let d = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from_integer((i as i64).into()))
        .collect();
    trim(d)
}

pub(crate) fn monic(a: QPoly) -> QPoly {
    let a = trim(a);
    match a.last().cloned() {
        Some(lead) if !lead.is_one() => a.into_iter().map(|c| c / &lead).collect(),
        _ => a,
    }
}

/// Quotient and remainder; `b` must be nonzero.
pub(crate) fn divrem(a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    let b = trim(b.clone());
    let mut r = trim(a.clone());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = b.last().expect("nonzero divisor").clone();
    let mut q = alloc::vec![BigRational::zero(); r.len() - b.len() + 1];
    while r.len() >= b.len() && !r.is_empty() {
        let shift = r.len() - b.len();
        let factor = r.last().unwrap() / &lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= c * &factor;
        }
        q[shift] = factor;
        r.pop();
        r = trim(r);
    }
    (trim(q), r)
}

pub(crate) fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
    let mut a = trim(a.clone());
    let mut b = trim(b.clone());
    while !b.is_empty() {
        let (_, r) = divrem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// Square-free decomposition `a = Π h_i^i` of a monic polynomial (Yun).
/// Returns the non-constant factors with their multiplicities.
pub(crate) fn squarefree(a: &QPoly) -> Vec<(QPoly, u32)> {
    let a = monic(a.clone());
    let mut out = Vec::new();
    let da = derivative(&a);
    let mut c = gcd(&a, &da);
    let mut w = divrem(&a, &c).0;
    let mut i = 1;
    while degree(&w) > 0 {
        let y = gcd(&w, &c);
        let z = divrem(&w, &y).0;
        if degree(&z) > 0 {
            out.push((monic(z), i));
        }
        i += 1;
        c = divrem(&c, &y).0;
        w = y;
    }
    out
}
