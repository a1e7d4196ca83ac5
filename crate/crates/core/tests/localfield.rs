use num_bigint::BigInt;
use num_rational::BigRational;
use padic_recur::localfield::{
    build_extension, classify_quadratic, eval_poly, hensel_lift, pi_expansion, reassemble, sqrt,
    FieldKind, QuadraticSplitting,
};
use padic_recur::prime::nu_p_big;
use padic_recur::{Digit, Error, ExtensionField, FieldValue, PadicValue, Prime, Valuation};
use proptest::prelude::*;

fn prime(p: u64) -> Prime {
    Prime::new(p).unwrap()
}

fn r(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn golden(p: u64) -> ExtensionField {
    build_extension(prime(p), &[r(-1), r(-1), r(1)]).unwrap()
}

fn poly(field: &ExtensionField, coeffs: &[i64], n: u32) -> Vec<PadicValue> {
    coeffs
        .iter()
        .map(|&c| PadicValue::from_int(field, c, n))
        .collect()
}

#[test]
fn golden_ratio_field_classification() {
    let f5 = golden(5);
    assert_eq!((f5.degree(), f5.e(), f5.f()), (2, 2, 1));
    for p in [2, 3, 7, 13] {
        let f = golden(p);
        assert_eq!((f.degree(), f.e(), f.f()), (2, 1, 2), "p = {p}");
    }
    assert!(matches!(
        build_extension(prime(11), &[r(-1), r(-1), r(1)]),
        Err(Error::SplitModulus)
    ));
    let lin = build_extension(prime(11), &[r(-4), r(1)]).unwrap();
    assert_eq!((lin.degree(), lin.e(), lin.f()), (1, 1, 1));
    assert_eq!(lin.uniformizer(5), PadicValue::from_int(&lin, 11, 5));
    assert_eq!(
        lin.modulus_root(5).unwrap(),
        PadicValue::from_int(&lin, 4, 5)
    );
}

#[test]
fn uniformizer_has_valuation_one() {
    for (p, m) in [
        (5, [-1, -1]),
        (2, [-2, 0]),
        (3, [3, 0]),
        (3, [1, 0]),
        (2, [-1, -1]),
    ] {
        let f = build_extension(prime(p), &[r(m[0]), r(m[1]), r(1)]).unwrap();
        assert_eq!(f.uniformizer(20).valuation(), Valuation::Exact(1));
    }
}

#[test]
fn root_products_and_sums() {
    let f = golden(2);
    let phi = f.modulus_root(20).unwrap();
    let bar = &PadicValue::one(&f, 20) - &phi;
    let prod = &phi * &bar;
    assert_eq!(
        prod.coeffs(),
        vec![BigInt::from((1i64 << 20) - 1), BigInt::from(0)]
    );
    assert_eq!(&phi + &bar, PadicValue::one(&f, 20));

    let f5 = golden(5);
    let phi = f5.modulus_root(10).unwrap();
    let root5 = &phi.mul_int(2) - &PadicValue::one(&f5, 10);
    assert_eq!(root5.valuation(), Valuation::Exact(1));
    assert_eq!(&root5 * &root5, PadicValue::from_int(&f5, 5, 10));
    assert!(root5.invert().is_err());
}

#[test]
fn mismatched_fields_are_rejected() {
    let a = PadicValue::one(&golden(2), 5);
    let b = PadicValue::one(&golden(3), 5);
    assert!(matches!(a.try_add(&b), Err(Error::FieldMismatch)));
}

#[test]
fn valuations_in_z11() {
    let z = ExtensionField::base(prime(11));
    assert_eq!(
        PadicValue::from_int(&z, 363, 10).valuation(),
        Valuation::Exact(2)
    );
    assert_eq!(
        PadicValue::from_int(&z, 0, 10).valuation(),
        Valuation::AtLeast(10)
    );
    assert_eq!(
        PadicValue::from_int(&z, 11i64.pow(4), 3).valuation(),
        Valuation::AtLeast(3)
    );
}

#[test]
fn hensel_examples() {
    let z = ExtensionField::base(prime(11));
    let n = 12;
    let root5 = hensel_lift(&poly(&z, &[-5, 0, 1], n), &PadicValue::from_int(&z, 7, n)).unwrap();
    assert_eq!(root5.residue().0, 7);
    assert!((&root5 * &root5).eq_at(&PadicValue::from_int(&z, 5, n), n));
    let inv = root5.invert().unwrap();
    assert_eq!((&(&inv * &inv)).mul_int(5), PadicValue::one(&z, n));

    let phi = hensel_lift(&poly(&z, &[-1, -1, 1], n), &PadicValue::from_int(&z, 4, n)).unwrap();
    assert_eq!(phi.residue().0, 4);
    assert!(eval_poly(&poly(&z, &[-1, -1, 1], n), &phi).is_zero());

    let z2 = ExtensionField::base(prime(2));
    let f = poly(&z2, &[-1, 0, 1], 8);
    assert_eq!(
        hensel_lift(&f, &PadicValue::one(&z2, 8))
            .unwrap()
            .residue()
            .0,
        1
    );
    match hensel_lift(&f, &PadicValue::from_int(&z2, 3, 8)) {
        Ok(y) => assert!(eval_poly(&f, &y.lift(8)).valuation().bound() >= 2),
        Err(Error::HenselCriterion { .. }) => {}
        Err(e) => panic!("{e}"),
    }
    assert!(matches!(
        hensel_lift(&poly(&z2, &[-3, 0, 1], 8), &PadicValue::one(&z2, 8)),
        Err(Error::HenselCriterion { .. })
    ));
}

#[test]
fn square_roots() {
    let z = ExtensionField::base(prime(11));
    assert!(matches!(
        sqrt(&PadicValue::from_int(&z, 2, 10)),
        Err(Error::NotASquare)
    ));
    let s = sqrt(&PadicValue::from_int(&z, 5, 10)).unwrap();
    assert_eq!(s.residue().0, 4);
    assert!((&s * &s).eq_at(&PadicValue::from_int(&z, 5, 10), 10));
    assert!(matches!(
        sqrt(&PadicValue::from_int(&z, 11, 10)),
        Err(Error::NotASquare)
    ));
    let s = sqrt(&PadicValue::from_int(&z, 5 * 121, 10)).unwrap();
    assert_eq!(s.valuation(), Valuation::Exact(1));

    let z2 = ExtensionField::base(prime(2));
    let x = PadicValue::from_rational(&z2, &BigRational::new((-3).into(), 5.into()), 40).unwrap();
    let s = sqrt(&x).unwrap();
    assert_eq!(s.coeff(0) % 4u32, BigInt::from(1));
    assert!((&s * &s).eq_at(&x, s.precision()));
    assert!(sqrt(&PadicValue::from_int(&z2, 5, 10)).is_err());
}

#[test]
fn digit_examples() {
    let z = ExtensionField::base(prime(11));
    let d = pi_expansion(&PadicValue::from_int(&z, 363, 4));
    assert_eq!(
        d,
        vec![Digit::Int(0), Digit::Int(0), Digit::Int(3), Digit::Int(0)]
    );

    let f5 = golden(5);
    let phi = f5.modulus_root(3).unwrap();
    let root5 = &phi.mul_int(2) - &PadicValue::one(&f5, 3);
    let d = pi_expansion(&root5);
    // the normal-form generator may differ from √5 by a unit; check the shape
    assert_eq!(d[0], Digit::Int(0));
    assert_ne!(d[1], Digit::Int(0));
    assert_eq!(reassemble(&f5, &d), root5);

    let n = 2;
    let phi = hensel_lift(&poly(&z, &[-1, -1, 1], 6), &PadicValue::from_int(&z, 4, 6)).unwrap();
    let d = pi_expansion(&phi.truncate(n));
    assert_eq!(d[0], Digit::Int(4));
    let oracle = (0..121)
        .find(|x| (x * x - x - 1i64).rem_euclid(121) == 0 && x % 11 == 4)
        .unwrap();
    assert_eq!(d[1], Digit::Int((oracle / 11) as u64));
}

#[test]
fn quadratic_normal_forms() {
    // x² + 3x + 9 over Q_3: discriminant −27 has odd valuation
    match classify_quadratic(prime(3), &r(3), &r(9), None, 20).unwrap() {
        QuadraticSplitting::Field {
            field,
            root,
            conjugate,
        } => {
            assert_eq!(field.kind(), FieldKind::Ramified);
            let f = poly(&field, &[9, 3, 1], 40);
            assert!(eval_poly(&f, &root).is_zero());
            assert!(eval_poly(&f, &conjugate).is_zero());
        }
        _ => panic!("expected a field"),
    }
    // x² − 2 over Q_7 splits
    match classify_quadratic(prime(7), &r(0), &r(-2), None, 20).unwrap() {
        QuadraticSplitting::Split([a, b]) => {
            assert_eq!(&a + &b, PadicValue::zero(a.field(), 20));
            assert_eq!(&a * &a, PadicValue::from_int(a.field(), 2, 20));
        }
        _ => panic!("expected a split"),
    }
    // x² − 17 over Q_2 splits (17 ≡ 1 mod 8), x² + 12 is unramified after scaling
    assert!(matches!(
        classify_quadratic(prime(2), &r(0), &r(-17), None, 20).unwrap(),
        QuadraticSplitting::Split(_)
    ));
    match classify_quadratic(prime(2), &r(0), &r(12), None, 20).unwrap() {
        QuadraticSplitting::Field { field, root, .. } => {
            assert_eq!(field.kind(), FieldKind::Unramified);
            assert_eq!(
                &root * &root,
                PadicValue::from_int(&field, -12, root.precision())
            );
        }
        _ => panic!("expected a field"),
    }
    match classify_quadratic(prime(2), &r(0), &r(-6), None, 20).unwrap() {
        QuadraticSplitting::Field { field, root, .. } => {
            assert_eq!(field.kind(), FieldKind::Ramified);
            assert_eq!(
                &root * &root,
                PadicValue::from_int(&field, 6, root.precision())
            );
        }
        _ => panic!("expected a field"),
    }
}

#[test]
fn field_values_with_negative_valuation() {
    let f5 = golden(5);
    let n = 20;
    let phi = f5.modulus_root(n).unwrap();
    let root5 = &phi.mul_int(2) - &PadicValue::one(&f5, n);
    let inv = FieldValue::from_padic(&root5).invert().unwrap();
    assert_eq!(inv.valuation().exact(), Some(-1));
    let back = inv.try_mul(&FieldValue::from_padic(&root5)).unwrap();
    assert_eq!(
        back.to_padic(None).unwrap().truncate(n - 2),
        PadicValue::one(&f5, n - 2)
    );
    let fifth = FieldValue::from_rational(&f5, &BigRational::new(1.into(), 5.into()), n).unwrap();
    assert_eq!(fifth.valuation().exact(), Some(-2));
    let sq = inv.try_mul(&inv).unwrap();
    assert!(sq.congruent(&fifth));
}

fn fields() -> Vec<ExtensionField> {
    let mut v: Vec<ExtensionField> = [2, 3, 5, 7, 11, 13]
        .iter()
        .map(|&p| ExtensionField::base(prime(p)))
        .collect();
    for p in [2, 3, 7, 13] {
        v.push(golden(p));
    }
    v.push(golden(5));
    v.push(build_extension(prime(2), &[r(-2), r(0), r(1)]).unwrap());
    v.push(build_extension(prime(3), &[r(-3), r(0), r(1)]).unwrap());
    v
}

fn value_strategy() -> impl Strategy<Value = PadicValue> {
    let n = fields().len();
    (0..n, any::<u64>(), any::<u64>(), 1u32..30).prop_map(|(i, a, b, prec)| {
        let f = fields()[i].clone();
        let coeffs: Vec<BigInt> = [a, b][..f.degree() as usize]
            .iter()
            .map(|&c| BigInt::from(c))
            .collect();
        PadicValue::from_coeffs(&f, &coeffs, prec).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn digits_round_trip(x in value_strategy()) {
        let d = pi_expansion(&x);
        prop_assert_eq!(d.len() as u32, x.precision());
        prop_assert_eq!(reassemble(x.field(), &d), x);
    }

    #[test]
    fn units_invert(x in value_strategy()) {
        if x.is_unit() {
            let y = x.invert().unwrap();
            prop_assert_eq!(&x * &y, PadicValue::one(x.field(), x.precision()));
        } else {
            prop_assert!(x.invert().is_err());
        }
    }

    #[test]
    fn valuation_matches_norm(x in value_strategy()) {
        if let Valuation::Exact(v) = x.valuation() {
            let nv = nu_p_big(x.norm().coeff(0), x.field().p());
            let d = x.field().degree();
            let e = x.field().e();
            // ν_p(N x) = d ν_p(x) = d v / e, provided the norm is known that far
            if (d * v / e) < x.norm().precision() {
                prop_assert_eq!(nv, Some(d * v / e));
            }
        }
    }

    #[test]
    fn valuation_is_additive(x in value_strategy(), k in 0u32..4) {
        let y = x.mul_pi_pow(k);
        if let (Valuation::Exact(a), Valuation::Exact(b)) = (x.valuation(), y.valuation()) {
            prop_assert_eq!(a + k, b);
        }
        prop_assert_eq!(y.div_pi_pow(k).unwrap(), x);
    }

    #[test]
    fn product_valuation(x in value_strategy(), y in value_strategy()) {
        if x.field() == y.field() {
            let z = &x * &y;
            if let (Valuation::Exact(a), Valuation::Exact(b)) = (x.valuation(), y.valuation()) {
                if a + b < z.precision() {
                    prop_assert_eq!(z.valuation(), Valuation::Exact(a + b));
                }
            }
        }
    }

    #[test]
    fn square_roots_square_back(a in 1u64..1_000_000, pi in 0usize..6, k in 0u32..3) {
        let p = [2u64, 3, 5, 7, 11, 13][pi];
        let z = ExtensionField::base(prime(p));
        let x = PadicValue::from_int(&z, (a * a) as i64, 30).mul_pi_pow(2 * k).truncate(30);
        let s = sqrt(&x).unwrap();
        prop_assert!((&s * &s).eq_at(&x, s.precision()));
    }
}
