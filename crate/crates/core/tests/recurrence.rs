use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use padic_recur::localfield::{FieldKind, FieldValue};
use padic_recur::recurrence::{
    classify, error_constants, spectral_decompose, AbsValue, InterpolabilityTag, RecurrenceSpec,
};
use padic_recur::{Error, ExtensionField, PadicValue, Prime, Valuation};
use rand::{Rng, SeedableRng};

/// Exact terms over `Q`, independent of the library.
fn exact_terms(coeffs: &[BigRational], initial: &[BigRational], n_max: usize) -> Vec<BigRational> {
    let mut s = initial.to_vec();
    let l = coeffs.len();
    while s.len() <= n_max {
        let n = s.len() - l;
        let mut acc = BigRational::zero();
        for i in 0..l {
            acc -= &coeffs[i] * &s[n + i];
        }
        s.push(acc);
    }
    s
}

fn r(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn spec(p: u64, a: &[i64], s: &[i64], n: u32) -> RecurrenceSpec {
    RecurrenceSpec::from_ints(p, a, s, n).unwrap()
}

fn check_binet(spec: &RecurrenceSpec, n_max: usize) {
    let sd = spectral_decompose(spec).unwrap();
    let exact = exact_terms(spec.coeffs(), spec.initial(), n_max);
    let e = sd.field().e();
    let target = spec.precision() * e;
    for (n, s) in exact.iter().enumerate() {
        let lhs = FieldValue::from_rational(sd.field(), s, target + 4).unwrap();
        let rhs = sd.term(n as u64).unwrap();
        let diff = lhs.try_sub(&rhs).unwrap();
        assert!(
            diff.valuation().bound() >= target as i64,
            "{spec}: n = {n}, diff {diff}"
        );
    }
}

#[test]
fn term_examples() {
    let fib = RecurrenceSpec::fibonacci(11, 10).unwrap();
    let t: Vec<BigInt> = fib.terms_mod(10, 10);
    let want = [0, 1, 1, 2, 3, 5, 8, 13, 21, 34, 55];
    assert_eq!(t, want.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
    let dbl = spec(2, &[-2, 0], &[1, 1], 10);
    assert_eq!(dbl.terms_mod(6, 10)[6], BigInt::from(8));
    assert_eq!(
        RecurrenceSpec::fibonacci(11, 2).unwrap().terms_mod(25, 2)[25],
        BigInt::from(5)
    );
    assert_eq!(
        fib.eval_terms(3)[3],
        PadicValue::from_int(&ExtensionField::base(Prime::new(11).unwrap()), 2, 10)
    );
}

#[test]
fn fast_terms_match_iteration() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(3);
    for _ in 0..50 {
        let p = [2u64, 3, 5, 7, 11][rng.gen_range(0..5)];
        let l = rng.gen_range(1..5);
        let a: Vec<i64> = (0..l).map(|_| rng.gen_range(-20..20)).collect();
        let s: Vec<i64> = (0..l).map(|_| rng.gen_range(-20..20)).collect();
        let sp = spec(p, &a, &s, 8);
        let direct = sp.terms_mod(300, 8);
        for n in [0usize, 1, 2, 7, 64, 99, 255, 300] {
            let fast = sp.term_at(&BigInt::from(n), 8).unwrap();
            assert_eq!(fast.coeff(0), &direct[n], "{sp} n={n}");
        }
    }
    // F(−n) = (−1)^{n+1} F(n)
    let fib = RecurrenceSpec::fibonacci(7, 12).unwrap();
    let z = ExtensionField::base(Prime::new(7).unwrap());
    for n in 1..40i64 {
        let pos = fib.term_at(&BigInt::from(n), 12).unwrap();
        let neg = fib.term_at(&BigInt::from(-n), 12).unwrap();
        let sign = if n % 2 == 0 { -1 } else { 1 };
        assert_eq!(neg, pos.mul_int(sign));
        assert_eq!(neg.field(), &z);
    }
    // a_0 divisible by p: no two-sided extension
    let dbl = spec(2, &[-2, 0], &[1, 1], 10);
    assert!(matches!(
        dbl.term_at(&BigInt::from(-1), 10),
        Err(Error::TwoSidedUnavailable)
    ));
}

#[test]
fn pisano_period_mod_11() {
    let t = RecurrenceSpec::fibonacci(11, 1).unwrap().terms_mod(40, 1);
    let period = (1..40).find(|&k| t[k] == t[0] && t[k + 1] == t[1]).unwrap();
    assert_eq!(period, 10);
}

#[test]
fn fibonacci_spectrum_at_11() {
    let fib = RecurrenceSpec::fibonacci(11, 20).unwrap();
    let sd = spectral_decompose(&fib).unwrap();
    assert_eq!(sd.field().kind(), FieldKind::Base);
    assert_eq!(sd.roots().len(), 2);
    let n = sd.precision();
    let (a, b) = (&sd.roots()[0].value, &sd.roots()[1].value);
    let z = sd.field().clone();
    // φ and φ̄: sum 1, product −1
    assert_eq!(a + b, PadicValue::one(&z, n));
    assert_eq!(a * b, PadicValue::from_int(&z, -1, n));
    // c_φ (φ − φ̄) = 1 and c_φ̄ = −c_φ
    let c = &sd.binet(0)[0];
    let d = &sd.binet(1)[0];
    let diff = FieldValue::from_padic(&(a - b));
    let one = c.try_mul(&diff).unwrap();
    assert!(one.congruent(&FieldValue::one(&z, 20)));
    assert!(c.try_add(d).unwrap().is_zero());
    check_binet(&fib, 1000);
}

#[test]
fn doubling_spectrum() {
    let dbl = spec(2, &[-2, 0], &[1, 1], 20);
    let sd = spectral_decompose(&dbl).unwrap();
    assert_eq!(sd.field().kind(), FieldKind::Ramified);
    for root in sd.roots() {
        assert_eq!(root.value.valuation(), Valuation::Exact(1));
        let sq = &root.value * &root.value;
        assert_eq!(sq, PadicValue::from_int(sd.field(), 2, sq.precision()));
    }
    check_binet(&dbl, 200);
    let ec = error_constants(&sd);
    assert_eq!(ec.d, AbsValue::Power { num: 1, den: 2 });
    assert_eq!(format!("{}", ec.d), "p^(-1/2)");
}

#[test]
fn constant_and_repeated_roots() {
    let one = spec(5, &[-1], &[1], 10);
    let sd = spectral_decompose(&one).unwrap();
    assert_eq!(sd.roots().len(), 1);
    assert_eq!(
        sd.roots()[0].value,
        PadicValue::one(sd.field(), sd.precision())
    );
    assert!(sd.binet(0)[0].congruent(&FieldValue::one(sd.field(), 10)));

    // (x − 2)^2 at p = 3: s(n) = (c0 + c1 n) 2^n
    let rep = spec(3, &[4, -4], &[1, 5], 12);
    let sd = spectral_decompose(&rep).unwrap();
    assert_eq!(sd.roots().len(), 1);
    assert_eq!(sd.roots()[0].multiplicity, 2);
    check_binet(&rep, 300);

    // (x − 1)(x − 4) at p = 3: distinct roots congruent mod 3
    let close = spec(3, &[4, -5], &[2, 3], 12);
    check_binet(&close, 300);

    // (x² + 1)^2 at p = 3: a repeated unramified pair
    let sq = spec(3, &[1, 0, 2, 0], &[1, 0, 2, 5], 12);
    let sd = spectral_decompose(&sq).unwrap();
    assert_eq!(sd.field().kind(), FieldKind::Unramified);
    check_binet(&sq, 200);
}

#[test]
fn fibonacci_classifications() {
    for p in [2, 3, 5, 7, 11, 13] {
        let c = classify(&RecurrenceSpec::fibonacci(p, 10).unwrap()).unwrap();
        assert_eq!(c.tag, InterpolabilityTag::ExactTwisted);
    }
    let c = classify(&RecurrenceSpec::fibonacci(11, 10).unwrap()).unwrap();
    assert_eq!((c.q, c.f, c.function_count()), (Some(1), Some(1), Some(10)));
    let c = classify(&RecurrenceSpec::fibonacci(2, 10).unwrap()).unwrap();
    assert_eq!((c.q, c.f, c.function_count()), (Some(2), Some(2), Some(6)));

    let dbl = classify(&spec(2, &[-2, 0], &[1, 1], 10)).unwrap();
    assert_eq!(dbl.tag, InterpolabilityTag::ApproximateOnly);
    assert!(dbl.unit_part_empty);
    assert!(!dbl.has_twisted_interpolation());

    let mixed = spec(2, &[6, -2, -3], &[1, 1, 1], 10);
    let c = classify(&mixed).unwrap();
    assert_eq!(c.tag, InterpolabilityTag::ApproximateOnly);
    assert!(!c.unit_part_empty);
    let sd = spectral_decompose(&mixed).unwrap();
    let mut vals: Vec<Valuation> = sd.roots().iter().map(|r| r.value.valuation()).collect();
    vals.sort_by_key(|v| v.bound());
    assert_eq!(
        vals,
        vec![
            Valuation::Exact(0),
            Valuation::Exact(1),
            Valuation::Exact(1)
        ]
    );

    let cubic = classify(&spec(3, &[-2, 0, 0], &[1, 1, 1], 10)).unwrap();
    assert_eq!(cubic.tag, InterpolabilityTag::ExactTwisted);
    assert_eq!(cubic.q, Some(9));
    assert!(matches!(
        spectral_decompose(&spec(3, &[-2, 0, 0], &[1, 1, 1], 10)),
        Err(Error::SplittingFieldUnsupported(_))
    ));

    let zero = spec(7, &[-1, -1], &[0, 0], 10);
    assert_eq!(
        classify(&zero).unwrap().tag,
        InterpolabilityTag::IdenticallyZero
    );
    let ec = error_constants(&spectral_decompose(&zero).unwrap());
    assert_eq!((ec.c, ec.d), (AbsValue::Zero, AbsValue::Zero));
    let ec =
        error_constants(&spectral_decompose(&RecurrenceSpec::fibonacci(11, 10).unwrap()).unwrap());
    assert_eq!((ec.c, ec.d), (AbsValue::Zero, AbsValue::Zero));
}

#[test]
fn rejects_bad_input() {
    assert!(matches!(
        RecurrenceSpec::from_ints(4, &[1], &[1], 5),
        Err(Error::NotPrime(4))
    ));
    let half = BigRational::new(1.into(), 2.into());
    let p = Prime::new(2).unwrap();
    assert!(RecurrenceSpec::new(p, vec![half.clone()], vec![r(1)], 5).is_err());
    let p3 = Prime::new(3).unwrap();
    assert!(RecurrenceSpec::new(p3, vec![half], vec![r(1)], 5).is_ok());
    assert!(RecurrenceSpec::from_ints(3, &[1, 1], &[1], 5).is_err());
    let lower = spec(3, &[0, -1], &[1, 1], 5);
    assert!(matches!(
        spectral_decompose(&lower),
        Err(Error::InvalidRecurrence(_))
    ));
}

#[test]
fn approximate_bound_and_fast_path() {
    let mixed = spec(2, &[6, -2, -3], &[1, 1, 1], 30);
    let sd = spectral_decompose(&mixed).unwrap();
    let ec = error_constants(&sd);
    let exact = exact_terms(mixed.coeffs(), mixed.initial(), 400);
    let mut nonzero = 0;
    for (n, s) in exact.iter().enumerate() {
        let lhs = FieldValue::from_rational(sd.field(), s, 80).unwrap();
        let diff = lhs.try_sub(&sd.unit_part(n as u64).unwrap()).unwrap();
        let bound = ec.bound_valuation(n as u64).unwrap();
        assert!(
            diff.valuation().bound() >= bound.min(diff.abs_precision()),
            "n = {n}"
        );
        if !diff.is_zero() {
            nonzero += 1;
        }
    }
    assert!(nonzero > 10);

    // random unit-a_0 specs: the fast path agrees with the spectral path
    let mut rng = rand::rngs::StdRng::seed_from_u64(17);
    let mut checked = 0;
    while checked < 200 {
        let p = [3u64, 5, 7, 11, 13][rng.gen_range(0..5)];
        let a1 = rng.gen_range(-30..30);
        let a0 = rng.gen_range(-30..30);
        if a0 % p as i64 == 0 {
            continue;
        }
        let sp = spec(
            p,
            &[a0, a1],
            &[rng.gen_range(-9..9), rng.gen_range(-9..9)],
            10,
        );
        let Ok(sd) = spectral_decompose(&sp) else {
            continue;
        };
        assert!(sd.roots().iter().all(|r| r.is_unit()));
        if !sp.is_zero_sequence() {
            assert_eq!(classify(&sp).unwrap().tag, InterpolabilityTag::ExactTwisted);
        }
        check_binet(&sp, 100);
        checked += 1;
    }
}
