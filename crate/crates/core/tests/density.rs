use std::collections::{BTreeSet, HashSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use padic_recur::density::{
    attained_residues, bracket_check, density_profile, exact_limiting_density, residue_tree,
    CosetStatus, DensityMode, ExactDensity, DEFAULT_STATE_BUDGET,
};
use padic_recur::recurrence::RecurrenceSpec;
use padic_recur::{Error, ErrorKind};
use proptest::prelude::*;

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Residues by walking the orbit and remembering every state.
fn naive_residues(p: u64, coeffs: &[i64], initial: &[i64], alpha: u32) -> BTreeSet<u64> {
    let m = p.pow(alpha) as i128;
    let mut state: Vec<i128> = initial.iter().map(|&x| (x as i128).rem_euclid(m)).collect();
    let mut seen = HashSet::new();
    let mut out = BTreeSet::new();
    while seen.insert(state.clone()) {
        out.insert(state[0] as u64);
        let next = -coeffs
            .iter()
            .zip(&state)
            .map(|(&a, &s)| a as i128 * s)
            .sum::<i128>();
        state.remove(0);
        state.push(next.rem_euclid(m));
    }
    out
}

fn fib(p: u64) -> RecurrenceSpec {
    RecurrenceSpec::fibonacci(p, 20).unwrap()
}

#[test]
fn oracle_agrees_with_state_walk() {
    let cases: &[(u64, &[i64], &[i64], u32)] = &[
        (11, &[-1, -1], &[0, 1], 3),
        (3, &[-1, -1], &[0, 1], 5),
        (5, &[-1, -1], &[2, 1], 4),
        (7, &[1, -3], &[1, 4], 3),
        (2, &[0, -2], &[1, 1], 6),
        (5, &[1, 0, -2], &[0, 0, 1], 3),
    ];
    for &(p, c, init, alpha) in cases {
        let spec = RecurrenceSpec::from_ints(p, c, init, 10).unwrap();
        let got = attained_residues(&spec, alpha, DEFAULT_STATE_BUDGET).unwrap();
        let want: Vec<u64> = naive_residues(p, c, init, alpha).into_iter().collect();
        assert_eq!(got.residues, want, "p={p} coeffs={c:?}");
    }
}

#[test]
fn fibonacci_eleven_levels() {
    let level = attained_residues(&fib(11), 1, DEFAULT_STATE_BUDGET).unwrap();
    assert_eq!(level.residues, vec![0, 1, 2, 3, 5, 8, 10]);
    assert_eq!(level.density(), ratio(7, 11));
}

#[test]
fn fibonacci_eleven_tree() {
    let tree = residue_tree(&fib(11), 3, DensityMode::Empirical, DEFAULT_STATE_BUDGET).unwrap();
    assert_eq!(tree.child_digits(1, 5), vec![0]);
    assert_eq!(tree.child_digits(2, 5), vec![0, 4, 5, 6, 8, 9]);
    assert!(tree.full_marks.is_empty());

    let tree = residue_tree(&fib(11), 3, DensityMode::Exact, DEFAULT_STATE_BUDGET).unwrap();
    let full1: Vec<u64> = (0..11).filter(|&r| tree.is_full(1, r)).collect();
    assert_eq!(full1, vec![0, 1, 2, 3, 8, 10]);
    assert!(!tree.is_full(1, 5));
    assert!(!tree.is_full(2, 5));
    assert_eq!(tree.child_digits(2, 5), vec![0, 4, 5, 6, 8, 9]);
    let framed: Vec<u64> = [0, 4, 5, 6, 8, 9]
        .into_iter()
        .filter(|&d| tree.is_full(3, 5 + d * 121))
        .collect();
    assert_eq!(framed, vec![0, 4, 5, 6, 8]);
    // full nodes are not expanded
    assert!(tree.child_digits(1, 0).is_empty());
}

#[test]
fn fibonacci_eleven_exact_density() {
    let analysis = ExactDensity::analyze(&fib(11)).unwrap();
    // shells at 5 mod 11: levels 2, 4, 6, … each of measure (p−1)/(2p)·p^{-d}
    let mut shells = BigRational::zero();
    for a in 1..60 {
        shells += ratio(5, 1) / BigRational::from(BigInt::from(11).pow(2 * a + 1));
    }
    let shell_exact = analysis.union_measure(|i| i == 5).unwrap();
    assert_eq!(shell_exact, ratio(1, 264));
    assert!(&shell_exact - &shells < ratio(1, 10i64.pow(18)));
    assert_eq!(analysis.union_measure(|i| i != 5).unwrap(), ratio(6, 11));
    assert_eq!(analysis.measure().unwrap(), ratio(145, 264));

    let report = exact_limiting_density(&fib(11)).unwrap();
    assert_eq!(report.exact_limit, Some(ratio(145, 264)));
    assert_eq!(report.components.len(), 10);
    assert_eq!(report.components[5].1, ratio(1, 264));
}

#[test]
fn exact_profile_matches_oracle() {
    for p in [3u64, 5, 7, 11, 13] {
        let spec = fib(p);
        let analysis = ExactDensity::analyze(&spec).unwrap();
        for alpha in 1..=3 {
            let level = attained_residues(&spec, alpha, DEFAULT_STATE_BUDGET).unwrap();
            let predicted: Vec<u64> = analysis
                .predicted_residues(alpha)
                .unwrap()
                .iter()
                .map(|r| u64::try_from(r).unwrap())
                .collect();
            assert_eq!(predicted, level.residues, "p={p} alpha={alpha}");
        }
    }
}

#[test]
fn full_density_primes() {
    for p in [3u64, 5] {
        let spec = fib(p);
        let profile = density_profile(&spec, 5, DEFAULT_STATE_BUDGET).unwrap();
        assert!(profile.profile.iter().all(|d| d.is_one()), "p={p}");
        let exact = exact_limiting_density(&spec).unwrap();
        assert_eq!(exact.exact_limit, Some(BigRational::one()), "p={p}");
        assert!(bracket_check(&exact, &profile));
    }
}

#[test]
fn zero_sequence() {
    let spec = RecurrenceSpec::from_ints(7, &[-1, -1], &[0, 0], 10).unwrap();
    let profile = density_profile(&spec, 4, DEFAULT_STATE_BUDGET).unwrap();
    for (a, d) in profile.profile.iter().enumerate() {
        assert_eq!(*d, ratio(1, 7i64.pow(a as u32 + 1)));
    }
    let exact = exact_limiting_density(&spec).unwrap();
    assert_eq!(exact.exact_limit, Some(BigRational::zero()));
    assert!(bracket_check(&exact, &profile));
}

#[test]
fn unsupported_classes() {
    let pow2 = RecurrenceSpec::from_ints(3, &[-2], &[1], 10).unwrap();
    let err = exact_limiting_density(&pow2).unwrap_err();
    assert!(matches!(err, Error::ExactDensityUnsupported(_)));
    assert_eq!(err.kind(), ErrorKind::Unsupported);
    let cubic = RecurrenceSpec::from_ints(5, &[-1, -1, -1], &[0, 0, 1], 10).unwrap();
    assert!(exact_limiting_density(&cubic).is_err());
    assert!(exact_limiting_density(&fib(2)).is_err());
}

#[test]
fn budget_is_enforced() {
    let err = attained_residues(&fib(11), 4, 100).unwrap_err();
    assert_eq!(
        err,
        Error::StateBudgetExceeded {
            alpha: 4,
            budget: 100
        }
    );
}

#[test]
fn bracket_for_fibonacci_eleven() {
    let exact = exact_limiting_density(&fib(11)).unwrap();
    let profile = density_profile(&fib(11), 4, DEFAULT_STATE_BUDGET).unwrap();
    assert!(bracket_check(&exact, &profile));
    // the gap is the shell tail still visible at level α
    let gap = &profile.profile[3] - ratio(145, 264);
    assert!(gap > BigRational::zero() && gap < ratio(1, 11i64.pow(3)));
    let mut wrong = exact.clone();
    wrong.exact_limit = Some(ratio(2, 3));
    assert!(!bracket_check(&wrong, &profile));
}

#[test]
fn coset_status_examples() {
    let analysis = ExactDensity::analyze(&fib(11)).unwrap();
    let s = |z: i64, k| analysis.coset_status(&BigInt::from(z), k).unwrap();
    assert_eq!(s(3, 1), CosetStatus::Inside);
    assert_eq!(s(4, 1), CosetStatus::Outside);
    assert_eq!(s(5, 1), CosetStatus::Partial);
    assert_eq!(s(5 + 11, 2), CosetStatus::Outside);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_is_non_increasing(
        p in prop::sample::select(vec![2u64, 3, 5, 7]),
        a1 in -6i64..6,
        a0 in prop::sample::select(vec![-1i64, 1, 2, 3]),
        s0 in -5i64..5,
        s1 in -5i64..5,
    ) {
        let spec = RecurrenceSpec::from_ints(p, &[a0, a1], &[s0, s1], 10);
        prop_assume!(spec.is_ok());
        let alpha = if p == 2 { 7 } else { 4 };
        let report = density_profile(&spec.unwrap(), alpha, DEFAULT_STATE_BUDGET).unwrap();
        for w in report.profile.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn exact_residues_match_oracle(
        p in prop::sample::select(vec![3u64, 5, 7, 11, 13]),
        a1 in -8i64..8,
        a0 in prop::sample::select(vec![-1i64, 1]),
        s0 in -6i64..6,
        s1 in -6i64..6,
    ) {
        let spec = RecurrenceSpec::from_ints(p, &[a0, a1], &[s0, s1], 20).unwrap();
        let analysis = ExactDensity::analyze(&spec);
        prop_assume!(analysis.is_ok());
        let analysis = analysis.unwrap();
        for alpha in 1..=2 {
            let level = attained_residues(&spec, alpha, DEFAULT_STATE_BUDGET).unwrap();
            let predicted: Vec<u64> = analysis
                .predicted_residues(alpha)
                .unwrap()
                .iter()
                .map(|r| u64::try_from(r).unwrap())
                .collect();
            prop_assert_eq!(predicted, level.residues);
        }
        let limit = analysis.measure().unwrap();
        let top = attained_residues(&spec, 3, DEFAULT_STATE_BUDGET).unwrap();
        prop_assert!(limit <= top.density());
    }
}
