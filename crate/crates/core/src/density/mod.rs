//! Residues attained by `s(n)` modulo `p^α`, residue trees and limiting
//! densities.
//!
//! The orbit oracle follows the single forward orbit of the state vector
//! `(s(n), …, s(n+ℓ−1)) mod p^α` until it cycles. Exact limiting densities
//! come from [`ExactDensity`], which describes the closure of the sequence as
//! a finite union of balls and "critical shells".

mod exact;

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::prime::rational_residue;
use crate::recurrence::RecurrenceSpec;
use crate::{Error, Result};

pub use exact::{CosetStatus, ExactDensity, ImagePiece, DEFAULT_DEPTH_LIMIT};

/// Default bound on the number of orbit steps per level.
pub const DEFAULT_STATE_BUDGET: u64 = 100_000_000;

/// Largest modulus for which a dense bitset is used to collect residues.
const BITSET_LIMIT: u64 = 1 << 30;

/// The residues `{s(n) mod p^α : n ≥ 0}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueLevel {
    pub alpha: u32,
    pub modulus: u64,
    /// Sorted.
    pub residues: Vec<u64>,
}

impl ResidueLevel {
    pub fn count(&self) -> usize {
        self.residues.len()
    }

    /// `count / p^α`.
    pub fn density(&self) -> BigRational {
        BigRational::new(BigInt::from(self.count()), BigInt::from(self.modulus))
    }

    pub fn contains(&self, r: u64) -> bool {
        self.residues.binary_search(&r).is_ok()
    }

    /// Reduce to level `alpha ≤ self.alpha`.
    pub fn project(&self, alpha: u32, p: u64) -> ResidueLevel {
        let modulus = p.pow(alpha);
        let set: BTreeSet<u64> = self.residues.iter().map(|r| r % modulus).collect();
        ResidueLevel {
            alpha,
            modulus,
            residues: set.into_iter().collect(),
        }
    }
}

struct Orbit {
    coeffs: Vec<u64>,
    modulus: u64,
}

impl Orbit {
    fn step(&self, s: &mut [u64]) {
        let m = self.modulus as u128;
        let mut acc: u128 = 0;
        for (a, x) in self.coeffs.iter().zip(s.iter()) {
            acc = (acc + (*a as u128) * (*x as u128)) % m;
        }
        // s(n+ℓ) = −Σ a_i s(n+i)
        let next = ((m - acc) % m) as u64;
        s.rotate_left(1);
        let l = s.len();
        s[l - 1] = next;
    }
}

enum ResidueSet {
    Bits(Vec<u64>),
    Tree(BTreeSet<u64>),
}

impl ResidueSet {
    fn new(modulus: u64) -> Self {
        if modulus <= BITSET_LIMIT {
            ResidueSet::Bits(alloc::vec![0; (modulus as usize).div_ceil(64)])
        } else {
            ResidueSet::Tree(BTreeSet::new())
        }
    }

    fn insert(&mut self, r: u64) {
        match self {
            ResidueSet::Bits(b) => b[(r / 64) as usize] |= 1 << (r % 64),
            ResidueSet::Tree(t) => {
                t.insert(r);
            }
        }
    }

    fn into_sorted(self) -> Vec<u64> {
        match self {
            ResidueSet::Tree(t) => t.into_iter().collect(),
            ResidueSet::Bits(b) => {
                let mut out = Vec::new();
                for (w, word) in b.iter().enumerate() {
                    let mut x = *word;
                    while x != 0 {
                        let bit = x.trailing_zeros() as u64;
                        out.push(w as u64 * 64 + bit);
                        x &= x - 1;
                    }
                }
                out
            }
        }
    }
}

/// Exact set of residues of `s(n)` modulo `p^α`.
///
/// The orbit of the state vector is followed with Brent's cycle detection;
/// `budget` bounds the number of steps.
pub fn attained_residues(spec: &RecurrenceSpec, alpha: u32, budget: u64) -> Result<ResidueLevel> {
    if alpha == 0 {
        return Err(Error::InvalidArgument("alpha must be at least 1".into()));
    }
    let p = spec.p();
    let modulus = match p.pow_u64(alpha) {
        Some(m) if m < 1 << 62 => m,
        _ => return Err(Error::StateBudgetExceeded { alpha, budget }),
    };
    let to_u64 = |x: &BigRational| -> u64 {
        rational_residue(x, p, alpha)
            .expect("validated at construction")
            .to_u64()
            .unwrap()
    };
    let orbit = Orbit {
        coeffs: spec.coeffs().iter().map(to_u64).collect(),
        modulus,
    };
    let start: Vec<u64> = spec.initial().iter().map(to_u64).collect();

    // Brent: cycle length λ, then pre-period μ
    let mut steps: u64 = 0;
    let mut power: u64 = 1;
    let mut lam: u64 = 1;
    let mut tortoise = start.clone();
    let mut hare = start.clone();
    orbit.step(&mut hare);
    while tortoise != hare {
        if power == lam {
            tortoise.clone_from(&hare);
            power *= 2;
            lam = 0;
        }
        orbit.step(&mut hare);
        lam += 1;
        steps += 1;
        if steps > budget {
            return Err(Error::StateBudgetExceeded { alpha, budget });
        }
    }
    let mut tortoise = start.clone();
    let mut hare = start.clone();
    for _ in 0..lam {
        orbit.step(&mut hare);
    }
    let mut mu: u64 = 0;
    while tortoise != hare {
        orbit.step(&mut tortoise);
        orbit.step(&mut hare);
        mu += 1;
        if steps + mu > budget {
            return Err(Error::StateBudgetExceeded { alpha, budget });
        }
    }
    let mut set = ResidueSet::new(modulus);
    let mut s = start;
    for _ in 0..mu + lam {
        set.insert(s[0]);
        orbit.step(&mut s);
    }
    Ok(ResidueLevel {
        alpha,
        modulus,
        residues: set.into_sorted(),
    })
}

/// How a [`DensityReport`] was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DensityMode {
    /// Orbit enumeration per level.
    Empirical,
    /// Image analysis; the profile holds predicted level densities.
    Exact,
}

/// Per-level densities and, in exact mode, the limiting density.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensityReport {
    pub p: u64,
    pub mode: DensityMode,
    /// Densities for `α = 1, 2, …`.
    pub profile: Vec<BigRational>,
    pub exact_limit: Option<BigRational>,
    /// `(i, μ(s_i(Z_p)))` for each interpolant (exact mode).
    pub components: Vec<(u64, BigRational)>,
    pub trace: Vec<String>,
}

/// Empirical densities for `α = 1..=alpha_max`.
///
/// The orbit is enumerated once at `alpha_max` and projected to lower levels.
pub fn density_profile(
    spec: &RecurrenceSpec,
    alpha_max: u32,
    budget: u64,
) -> Result<DensityReport> {
    let top = attained_residues(spec, alpha_max, budget)?;
    let p = spec.p().get();
    let profile: Vec<BigRational> = (1..=alpha_max)
        .map(|a| top.project(a, p).density())
        .collect();
    debug_assert!(profile.windows(2).all(|w| w[1] <= w[0]));
    Ok(DensityReport {
        p,
        mode: DensityMode::Empirical,
        profile,
        exact_limit: None,
        components: Vec::new(),
        trace: Vec::new(),
    })
}

/// Exact limiting density for the supported class (see [`ExactDensity`]).
pub fn exact_limiting_density(spec: &RecurrenceSpec) -> Result<DensityReport> {
    let analysis = ExactDensity::analyze(spec)?;
    analysis.report(exact::PREDICTED_LEVELS)
}

/// Consistency of an exact report with an empirical profile: the limit is a
/// lower bound, the profile does not increase, and where the exact report
/// predicts level densities they agree with the profile.
pub fn bracket_check(exact: &DensityReport, profile: &DensityReport) -> bool {
    let Some(limit) = &exact.exact_limit else {
        return false;
    };
    if exact.p != profile.p {
        return false;
    }
    let monotone = profile.profile.windows(2).all(|w| w[1] <= w[0]);
    let bounded = profile.profile.iter().all(|d| limit <= d);
    let agree = exact
        .profile
        .iter()
        .zip(profile.profile.iter())
        .all(|(a, b)| a == b);
    monotone && bounded && agree
}

/// Edge `parent → child = parent + digit · p^α` between levels `α` and `α+1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct TreeEdge {
    pub alpha: u32,
    pub parent: u64,
    pub digit: u64,
    pub child: u64,
}

/// The tree of attained residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueTree {
    pub p: u64,
    pub mode: DensityMode,
    /// Levels `1..=alpha_max` (oracle sets).
    pub levels: Vec<ResidueLevel>,
    /// Edges from the root (level 0, residue 0) downwards; full-marked nodes
    /// are not expanded.
    pub edges: Vec<TreeEdge>,
    /// `(α, residue)` pairs whose coset lies in the closure of the sequence.
    pub full_marks: BTreeSet<(u32, u64)>,
}

impl ResidueTree {
    pub fn is_full(&self, alpha: u32, r: u64) -> bool {
        self.full_marks.contains(&(alpha, r))
    }

    /// Digits on the edges leaving `(alpha, r)`.
    pub fn child_digits(&self, alpha: u32, r: u64) -> Vec<u64> {
        self.edges
            .iter()
            .filter(|e| e.alpha == alpha && e.parent == r)
            .map(|e| e.digit)
            .collect()
    }

    /// Nodes present in the tree at level `alpha` (reachable from the root).
    pub fn nodes(&self, alpha: u32) -> Vec<u64> {
        if alpha == 0 {
            return alloc::vec![0];
        }
        self.edges
            .iter()
            .filter(|e| e.alpha + 1 == alpha)
            .map(|e| e.child)
            .collect()
    }
}

/// Residue tree up to `alpha_max`. In exact mode nodes whose coset is
/// certified inside the closure are marked and not expanded.
pub fn residue_tree(
    spec: &RecurrenceSpec,
    alpha_max: u32,
    mode: DensityMode,
    budget: u64,
) -> Result<ResidueTree> {
    let p = spec.p().get();
    let top = attained_residues(spec, alpha_max, budget)?;
    let levels: Vec<ResidueLevel> = (1..=alpha_max).map(|a| top.project(a, p)).collect();
    let analysis = match mode {
        DensityMode::Exact => Some(ExactDensity::analyze(spec)?),
        DensityMode::Empirical => None,
    };
    let mut full_marks = BTreeSet::new();
    let mut edges = Vec::new();
    let mut frontier: Vec<u64> = alloc::vec![0];
    for alpha in 0..alpha_max {
        let level = &levels[alpha as usize];
        let step = p.pow(alpha);
        let mut next = Vec::new();
        for &parent in &frontier {
            for digit in 0..p {
                let child = parent + digit * step;
                if !level.contains(child) {
                    continue;
                }
                edges.push(TreeEdge {
                    alpha,
                    parent,
                    digit,
                    child,
                });
                let full = match &analysis {
                    Some(a) => {
                        a.coset_status(&BigInt::from(child), alpha + 1)? == CosetStatus::Inside
                    }
                    None => false,
                };
                if full {
                    full_marks.insert((alpha + 1, child));
                } else {
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    Ok(ResidueTree {
        p,
        mode,
        levels,
        edges,
        full_marks,
    })
}

pub(crate) fn pow_ratio(p: u64, k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p).pow(k))
}
