//! Exact limiting density for order-2 recurrences with two simple unit roots
//! whose product is `±1`.
//!
//! With `q = 1` each interpolant has the shape
//! `φ(x) = T₁ e^{xΛ} + T₂ e^{−xΛ}`, so around any `x₀ ∈ Z_p`
//!
//! ```text
//! φ(x₀ + t) = A cosh(tΛ) + B sinh(tΛ),   A = φ(x₀),  Λ B = φ'(x₀).
//! ```
//!
//! `Z_p` is cut into balls `x₀ + p^m Z_p`. On a ball where the linear Taylor
//! term dominates, the image is the ball `A + (BΛp^m) Z_p`. A ball containing
//! the critical point `x_c` (where `B = 0`) maps onto a union of shells
//! `φ(x_c) + κ p^{2j} (Z_p^×)²`, `κ = φ''(x_c)/2`. The union of these pieces is
//! measured by descending the coset tree of `Z_p` until every coset is inside,
//! outside, or contains only shells with a common centre, which are summed as
//! a geometric series.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::{pow_ratio, DensityMode, DensityReport};
use crate::analytic::{exp_p, log_p};
use crate::interpolation::TwistedInterpolation;
use crate::localfield::{ExtensionField, FieldValue, PadicValue, SignedValuation};
use crate::prime::{is_quadratic_residue, nu_p_factorial};
use crate::recurrence::RecurrenceSpec;
use crate::{Error, Result};

/// Maximum depth of the ball and coset descents.
pub const DEFAULT_DEPTH_LIMIT: u32 = 32;
pub(crate) const PREDICTED_LEVELS: u32 = 6;
const ANALYSIS_PRECISION: u32 = 64;

/// Shape of one piece of the closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PieceShape {
    /// `center + p^radius Z_p`.
    Ball { radius: u32 },
    /// `{center} ∪ {center + w : ν_p(w) = d, w/p^d ∈ unit·(Z_p^×)²}` over the
    /// levels `d = first_level, first_level + 2, …`.
    Shell { first_level: u32, unit: u64 },
    /// The single point `center`.
    Point,
}

/// A piece of the image of one interpolant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImagePiece {
    /// The interpolant `s_i`.
    pub index: u64,
    /// Known modulo `p^center_precision`.
    pub center: BigInt,
    pub center_precision: u32,
    pub shape: PieceShape,
}

impl ImagePiece {
    /// Description with the centre reduced to the digits that matter.
    pub fn describe(&self, p: u64) -> String {
        let reduce = |k: u32| residue_mod(&self.center, &BigInt::from(p).pow(k));
        match self.shape {
            PieceShape::Ball { radius } => format!(
                "i={}: ball {} + {p}^{radius} Z_{p}",
                self.index,
                reduce(radius)
            ),
            PieceShape::Shell { first_level, unit } => format!(
                "i={}: critical shells around {} mod {p}^{} from level {first_level}, class of {unit}",
                self.index,
                reduce(first_level + 1),
                first_level + 1
            ),
            PieceShape::Point => format!("i={}: point {} mod {p}^8", self.index, reduce(8)),
        }
    }
}

/// Position of a coset `z₀ + p^k Z_p` relative to the closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetStatus {
    Inside,
    Outside,
    /// Meets the closure without being contained in it.
    Partial,
}

/// The closure of `{s(n)}` described as a finite union of pieces.
#[derive(Clone, Debug)]
pub struct ExactDensity {
    p: u64,
    indices: u64,
    pieces: Vec<ImagePiece>,
    depth_limit: u32,
}

fn unsupported(msg: &str) -> Error {
    Error::ExactDensityUnsupported(msg.into())
}

fn precision_error(msg: &str) -> Error {
    Error::InsufficientPrecision(msg.into())
}

/// An element of `Q_p` given inside `K`, split as `(ν_p, unit)` with the
/// unit reduced modulo `p^prec`.
fn split_rational(v: &FieldValue) -> Result<(i64, BigInt, u32)> {
    let field = v.field();
    let e = field.e() as i64;
    let s = match v.valuation() {
        SignedValuation::Exact(s) => s,
        SignedValuation::AtLeast(_) => {
            return Err(precision_error("value indistinguishable from 0"))
        }
    };
    if s % e != 0 {
        return Err(precision_error("value is not in Q_p"));
    }
    let t = s / e;
    let pt = BigRational::from(BigInt::from(field.p().get())).pow(t as i32);
    let scale = FieldValue::from_rational(field, &pt, v.rel_precision())?;
    let unit = v.try_div(&scale)?.to_padic(None)?;
    let base = unit
        .to_base()
        .ok_or_else(|| precision_error("value is not in Q_p"))?;
    Ok((t, base.coeff(0).clone(), base.precision()))
}

fn integral_residue(v: &FieldValue) -> Result<(BigInt, u32)> {
    let x = v.to_padic(None)?;
    let base = x
        .to_base()
        .ok_or_else(|| precision_error("value is not in Q_p"))?;
    Ok((base.coeff(0).clone(), base.precision()))
}

struct Interpolant<'a> {
    field: &'a ExtensionField,
    p: u64,
    e: i64,
    lambda: &'a PadicValue,
    lambda_v: i64,
    t1: FieldValue,
    t2: FieldValue,
    critical: Option<PadicValue>,
    depth_limit: u32,
}

impl Interpolant<'_> {
    fn exp_at(&self, x: &PadicValue) -> Result<FieldValue> {
        Ok(FieldValue::from_padic(&exp_p(&(x * self.lambda))?))
    }

    fn integer(&self, x: &BigInt) -> PadicValue {
        PadicValue::from_bigint(self.field, x.clone(), self.lambda.precision())
    }

    /// Does the `u`-linear term of `A cosh + B sinh` dominate on the ball?
    fn linear_dominates(&self, nu_a: Option<i64>, nu_b: i64, lp: i64) -> bool {
        let (p, e) = (self.p as i64, self.e);
        let lin = lp + nu_b;
        let floor = nu_a.map_or(nu_b, |a| a.min(nu_b));
        for k in 2i64.. {
            if (k * lp + floor) * (p - 1) - e * (k - 1) > lin * (p - 1) {
                return true;
            }
            let tail = if k % 2 == 0 { nu_a } else { Some(nu_b) };
            if let Some(c) = tail {
                if k * lp - e * nu_p_factorial(k as u64, self.p) as i64 + c <= lin {
                    return false;
                }
            }
        }
        unreachable!()
    }

    /// Does the `u²` term of `2T cosh` dominate on the ball?
    fn quadratic_dominates(&self, lp: i64) -> bool {
        let (p, e) = (self.p as i64, self.e);
        let quad = 2 * lp;
        for k in 2i64.. {
            if (2 * k * lp) * (p - 1) - e * (2 * k - 1) > quad * (p - 1) {
                return true;
            }
            if 2 * k * lp - e * nu_p_factorial(2 * k as u64, self.p) as i64 <= quad {
                return false;
            }
        }
        unreachable!()
    }

    fn pieces(&self, index: u64, out: &mut Vec<ImagePiece>) -> Result<()> {
        let mut stack: Vec<(BigInt, u32)> = alloc::vec![(BigInt::zero(), 0)];
        while let Some((x0, m)) = stack.pop() {
            if m > self.depth_limit {
                return Err(Error::NoClosedForm(format!(
                    "interpolant {index} needs balls finer than p^{}",
                    self.depth_limit
                )));
            }
            let pm = BigInt::from(self.p).pow(m);
            let lp = self.lambda_v + self.e * m as i64;
            let holds_critical = self
                .critical
                .as_ref()
                .is_some_and(|c| (c.coeff(0) - &x0).is_multiple_of(&pm));
            if holds_critical {
                if self.quadratic_dominates(lp) {
                    let xc = self.critical.as_ref().unwrap().embed(self.field)?;
                    let t = self.t1.try_mul(&self.exp_at(&xc)?)?;
                    let lam = FieldValue::from_padic(self.lambda);
                    let kappa = t.try_mul(&lam)?.try_mul(&lam)?;
                    let (nu, unit, _) = split_rational(&kappa)?;
                    let first = nu + 2 * m as i64;
                    if first < 0 {
                        return Err(precision_error("critical value is not integral"));
                    }
                    let (center, prec) = integral_residue(&t.try_add(&t)?)?;
                    out.push(ImagePiece {
                        index,
                        center,
                        center_precision: prec,
                        shape: PieceShape::Shell {
                            first_level: first as u32,
                            unit: (unit % self.p).to_u64().unwrap(),
                        },
                    });
                    continue;
                }
            } else {
                let ex = self.exp_at(&self.integer(&x0))?;
                let exi = ex.invert()?;
                let u = self.t1.try_mul(&ex)?;
                let w = self.t2.try_mul(&exi)?;
                let a = u.try_add(&w)?;
                let b = u.try_sub(&w)?;
                let nu_a = a.valuation().exact();
                let nu_b = b
                    .valuation()
                    .exact()
                    .ok_or_else(|| precision_error("derivative indistinguishable from 0"))?;
                if self.linear_dominates(nu_a, nu_b, lp) {
                    let radius = lp + nu_b;
                    if radius % self.e != 0 || radius < 0 {
                        return Err(precision_error("image ball is not a Z_p ball"));
                    }
                    let (center, prec) = integral_residue(&a)?;
                    out.push(ImagePiece {
                        index,
                        center,
                        center_precision: prec,
                        shape: PieceShape::Ball {
                            radius: (radius / self.e) as u32,
                        },
                    });
                    continue;
                }
            }
            for d in 0..self.p {
                stack.push((&x0 + &pm * d, m + 1));
            }
        }
        Ok(())
    }
}

fn residue_mod(x: &BigInt, m: &BigInt) -> BigInt {
    x.mod_floor(m)
}

impl ExactDensity {
    /// Describe the closure of the sequence.
    ///
    /// Supported: the zero sequence, and order-2 recurrences over odd `p` with
    /// `a_0 = ±1`, two simple unit roots and `q = 1`.
    pub fn analyze(spec: &RecurrenceSpec) -> Result<Self> {
        Self::analyze_with_depth(spec, DEFAULT_DEPTH_LIMIT)
    }

    pub fn analyze_with_depth(spec: &RecurrenceSpec, depth_limit: u32) -> Result<Self> {
        let p = spec.p().get();
        if spec.is_zero_sequence() {
            return Ok(ExactDensity {
                p,
                indices: 1,
                pieces: alloc::vec![ImagePiece {
                    index: 0,
                    center: BigInt::zero(),
                    center_precision: u32::MAX,
                    shape: PieceShape::Point,
                }],
                depth_limit,
            });
        }
        if p == 2 {
            return Err(unsupported("p = 2"));
        }
        if spec.order() != 2 {
            return Err(unsupported("order must be 2"));
        }
        let a0 = &spec.coeffs()[0];
        if *a0 != BigRational::one() && *a0 != -BigRational::one() {
            return Err(unsupported("a_0 must be 1 or -1"));
        }
        let prec = spec.precision().max(ANALYSIS_PRECISION);
        let ti = TwistedInterpolation::build(&spec.clone().with_precision(prec))?;
        let sd = ti.spectral();
        if sd.roots().len() != 2 || sd.roots().iter().any(|r| r.multiplicity != 1) {
            return Err(unsupported("roots must be simple"));
        }
        if ti.units().len() != 2 {
            return Err(unsupported("roots must be units"));
        }
        if ti.q() != 1 {
            return Err(unsupported("q must be 1"));
        }
        let field = ti.field();
        let (u1, u2) = (&ti.units()[0], &ti.units()[1]);
        if !(&u1.lambda + &u2.lambda).is_zero() {
            return Err(precision_error("logarithms do not cancel"));
        }
        let c1 = sd.binet(u1.root)[0].clone();
        let c2 = sd.binet(u2.root)[0].clone();
        let period = ti.period();
        let mut pieces = Vec::new();
        for i in 0..period {
            let t1 = c1.try_mul(&FieldValue::from_padic(&u1.omega.pow_u64(i)))?;
            let t2 = c2.try_mul(&FieldValue::from_padic(&u2.omega.pow_u64(i)))?;
            if u1.lambda.is_zero() {
                let (center, prec) = integral_residue(&t1.try_add(&t2)?)?;
                pieces.push(ImagePiece {
                    index: i,
                    center,
                    center_precision: prec,
                    shape: PieceShape::Point,
                });
                continue;
            }
            let lambda_v = u1.lambda.valuation().bound() as i64;
            let critical = critical_point(&t1, &t2, &u1.lambda)?;
            let interp = Interpolant {
                field,
                p,
                e: field.e() as i64,
                lambda: &u1.lambda,
                lambda_v,
                t1,
                t2,
                critical,
                depth_limit,
            };
            interp.pieces(i, &mut pieces)?;
        }
        Ok(ExactDensity {
            p,
            indices: period,
            pieces,
            depth_limit,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn pieces(&self) -> &[ImagePiece] {
        &self.pieces
    }

    /// Number of interpolants `s_i`.
    pub fn index_count(&self) -> u64 {
        self.indices
    }

    fn piece_status(&self, pc: &ImagePiece, z0: &BigInt, k: u32) -> Result<CosetStatus> {
        let need = match pc.shape {
            PieceShape::Ball { radius } => radius.min(k),
            _ => k,
        };
        if pc.center_precision < need {
            return Err(precision_error("piece centre known to too few digits"));
        }
        let p = BigInt::from(self.p);
        let pk = p.pow(k);
        let same = |m: &BigInt| (&pc.center - z0).is_multiple_of(m);
        Ok(match pc.shape {
            PieceShape::Ball { radius } if radius <= k => {
                if same(&p.pow(radius)) {
                    CosetStatus::Inside
                } else {
                    CosetStatus::Outside
                }
            }
            PieceShape::Ball { .. } | PieceShape::Point => {
                if same(&pk) {
                    CosetStatus::Partial
                } else {
                    CosetStatus::Outside
                }
            }
            PieceShape::Shell { first_level, unit } => {
                let diff = residue_mod(&(z0 - &pc.center), &pk);
                if diff.is_zero() {
                    return Ok(CosetStatus::Partial);
                }
                let mut d = 0u32;
                let mut w = diff;
                while (&w % &p).is_zero() {
                    w /= &p;
                    d += 1;
                }
                if d < first_level || (d - first_level) % 2 == 1 {
                    return Ok(CosetStatus::Outside);
                }
                let w = (w % &p).to_u64().unwrap();
                if is_quadratic_residue(w, self.p) == is_quadratic_residue(unit, self.p) {
                    CosetStatus::Inside
                } else {
                    CosetStatus::Outside
                }
            }
        })
    }

    /// Position of `z0 + p^k Z_p` relative to the closure.
    pub fn coset_status(&self, z0: &BigInt, k: u32) -> Result<CosetStatus> {
        self.status_among(self.pieces.iter(), z0, k).map(|(s, _)| s)
    }

    fn status_among<'a>(
        &self,
        pieces: impl Iterator<Item = &'a ImagePiece>,
        z0: &BigInt,
        k: u32,
    ) -> Result<(CosetStatus, Vec<&'a ImagePiece>)> {
        let mut partial = Vec::new();
        for pc in pieces {
            match self.piece_status(pc, z0, k)? {
                CosetStatus::Inside => return Ok((CosetStatus::Inside, Vec::new())),
                CosetStatus::Partial => partial.push(pc),
                CosetStatus::Outside => {}
            }
        }
        let s = if partial.is_empty() {
            CosetStatus::Outside
        } else {
            CosetStatus::Partial
        };
        Ok((s, partial))
    }

    /// Haar measure of the union of the images of the selected interpolants.
    pub fn union_measure(&self, select: impl Fn(u64) -> bool) -> Result<BigRational> {
        let chosen: Vec<&ImagePiece> = self.pieces.iter().filter(|pc| select(pc.index)).collect();
        self.measure_rec(&chosen, &BigInt::zero(), 0)
    }

    /// The limiting density.
    pub fn measure(&self) -> Result<BigRational> {
        self.union_measure(|_| true)
    }

    /// `(i, μ(s_i(Z_p)))` for each interpolant.
    pub fn component_measures(&self) -> Result<Vec<(u64, BigRational)>> {
        (0..self.indices)
            .map(|i| Ok((i, self.union_measure(|j| j == i)?)))
            .collect()
    }

    fn measure_rec(&self, pieces: &[&ImagePiece], z0: &BigInt, k: u32) -> Result<BigRational> {
        let (status, partial) = self.status_among(pieces.iter().copied(), z0, k)?;
        match status {
            CosetStatus::Inside => return Ok(pow_ratio(self.p, k)),
            CosetStatus::Outside => return Ok(BigRational::zero()),
            CosetStatus::Partial => {}
        }
        if let Some(m) = self.concentric_measure(&partial, k) {
            return Ok(m);
        }
        if k >= self.depth_limit {
            return Err(Error::NoClosedForm(format!(
                "coset {z0} mod p^{k} is still undecided"
            )));
        }
        let step = BigInt::from(self.p).pow(k);
        let mut total = BigRational::zero();
        for d in 0..self.p {
            total += self.measure_rec(&partial, &(z0 + &step * d), k + 1)?;
        }
        Ok(total)
    }

    /// Measure inside the current coset when only shells and points sharing
    /// one centre remain.
    fn concentric_measure(&self, partial: &[&ImagePiece], k: u32) -> Option<BigRational> {
        if partial
            .iter()
            .any(|pc| matches!(pc.shape, PieceShape::Ball { .. }))
        {
            return None;
        }
        let prec = partial.iter().map(|pc| pc.center_precision).min()?;
        let m = BigInt::from(self.p).pow(prec.min(4 * self.depth_limit));
        let c0 = residue_mod(&partial[0].center, &m);
        if partial.iter().any(|pc| residue_mod(&pc.center, &m) != c0) {
            return None;
        }
        let shells: Vec<(u32, bool)> = partial
            .iter()
            .filter_map(|pc| match pc.shape {
                PieceShape::Shell { first_level, unit } => {
                    Some((first_level, is_quadratic_residue(unit, self.p)))
                }
                _ => None,
            })
            .collect();
        let half = BigRational::new(BigInt::from(self.p - 1), BigInt::from(2 * self.p));
        let level = |d: u32| -> BigRational {
            let mut classes = [false; 2];
            for &(first, qr) in &shells {
                if d >= first && (d - first) % 2 == 0 {
                    classes[qr as usize] = true;
                }
            }
            let n = classes.iter().filter(|c| **c).count();
            &half * BigInt::from(n) * pow_ratio(self.p, d)
        };
        let top = shells.iter().map(|s| s.0).max().unwrap_or(k).max(k);
        let mut total = BigRational::zero();
        for d in k..top {
            total += level(d);
        }
        let p2 = BigRational::from(BigInt::from(self.p * self.p));
        let tail = (level(top) + level(top + 1)) * &p2 / (&p2 - BigRational::one());
        Some(total + tail)
    }

    /// Residues modulo `p^alpha` whose coset meets the closure.
    pub fn predicted_residues(&self, alpha: u32) -> Result<Vec<BigInt>> {
        let mut out = Vec::new();
        self.collect_residues(
            &self.pieces.iter().collect::<Vec<_>>(),
            &BigInt::zero(),
            0,
            alpha,
            &mut out,
        )?;
        out.sort();
        Ok(out)
    }

    fn collect_residues(
        &self,
        pieces: &[&ImagePiece],
        z0: &BigInt,
        k: u32,
        alpha: u32,
        out: &mut Vec<BigInt>,
    ) -> Result<()> {
        let (status, partial) = self.status_among(pieces.iter().copied(), z0, k)?;
        let step = BigInt::from(self.p).pow(k);
        match status {
            CosetStatus::Outside => {}
            _ if k == alpha => out.push(z0.clone()),
            CosetStatus::Inside => {
                let span = BigInt::from(self.p).pow(alpha - k);
                let mut j = BigInt::zero();
                while j < span {
                    out.push(z0 + &step * &j);
                    j += 1;
                }
            }
            CosetStatus::Partial => {
                for d in 0..self.p {
                    self.collect_residues(&partial, &(z0 + &step * d), k + 1, alpha, out)?;
                }
            }
        }
        Ok(())
    }

    /// Number of residues modulo `p^alpha` attained by the sequence.
    pub fn predicted_count(&self, alpha: u32) -> Result<BigInt> {
        self.count_rec(
            &self.pieces.iter().collect::<Vec<_>>(),
            &BigInt::zero(),
            0,
            alpha,
        )
    }

    fn count_rec(&self, pieces: &[&ImagePiece], z0: &BigInt, k: u32, alpha: u32) -> Result<BigInt> {
        let (status, partial) = self.status_among(pieces.iter().copied(), z0, k)?;
        Ok(match status {
            CosetStatus::Outside => BigInt::zero(),
            _ if k == alpha => BigInt::one(),
            CosetStatus::Inside => BigInt::from(self.p).pow(alpha - k),
            CosetStatus::Partial => {
                let step = BigInt::from(self.p).pow(k);
                let mut total = BigInt::zero();
                for d in 0..self.p {
                    total += self.count_rec(&partial, &(z0 + &step * d), k + 1, alpha)?;
                }
                total
            }
        })
    }

    /// Exact-mode report with predicted densities for `α = 1..=levels`.
    pub fn report(&self, levels: u32) -> Result<DensityReport> {
        let limit = self.measure()?;
        let components = if self.indices > 1 || !self.pieces.is_empty() {
            self.component_measures()?
        } else {
            Vec::new()
        };
        let mut profile = Vec::new();
        for a in 1..=levels {
            let n = self.predicted_count(a)?;
            profile.push(BigRational::new(n, BigInt::from(self.p).pow(a)));
        }
        let mut trace: Vec<String> = self.pieces.iter().map(|pc| pc.describe(self.p)).collect();
        for (i, m) in &components {
            trace.push(format!("mu(s_{i}(Z_p)) = {m}"));
        }
        trace.push(format!("limit = {limit}"));
        Ok(DensityReport {
            p: self.p,
            mode: DensityMode::Exact,
            profile,
            exact_limit: Some(limit),
            components,
            trace,
        })
    }
}

/// The unique `x_c ∈ Z_p` with `e^{2 x_c Λ} = T₂/T₁`, if any.
fn critical_point(
    t1: &FieldValue,
    t2: &FieldValue,
    lambda: &PadicValue,
) -> Result<Option<PadicValue>> {
    if t1.is_zero() || t2.is_zero() {
        return Ok(None);
    }
    let rho = t2.try_div(t1)?;
    if rho.valuation() != SignedValuation::Exact(0) {
        return Ok(None);
    }
    let rho = rho.to_padic(None)?;
    let one = PadicValue::one(rho.field(), rho.precision());
    if (&rho - &one).is_unit() {
        return Ok(None);
    }
    let l = FieldValue::from_padic(&log_p(&rho)?);
    let two_lambda = FieldValue::from_padic(&lambda.mul_int(2));
    let xc = l.try_div(&two_lambda)?;
    if xc.valuation().bound() < 0 && !xc.is_zero() {
        return Ok(None);
    }
    Ok(xc.to_padic(None)?.to_base())
}
