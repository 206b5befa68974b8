use num_bigint::BigInt;
use num_rational::BigRational;
use orbilift::algebra::cyclotomic::field;
use orbilift::algebra::{rat_order, vars, CyclotomicNumber as Cyc, Monomial, Order, Polynomial, RationalFunction, Vars};
use proptest::prelude::*;

fn cyc() -> impl Strategy<Value = Cyc> {
    prop::sample::select(vec![1u32, 3, 4, 5, 6, 8, 12]).prop_flat_map(|n| {
        let d = field(n).degree();
        prop::collection::vec(-4i64..=4, d).prop_map(move |c| {
            Cyc::from_coords(n, c.into_iter().map(|x| BigRational::from_integer(BigInt::from(x))).collect()).unwrap()
        })
    })
}

fn zv() -> Vars {
    vars(&["z1", "z2"])
}

fn poly() -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(((0u32..3, 0u32..3), -3i64..=3, prop::bool::ANY), 0..5).prop_map(|terms| {
        let v = zv();
        let mut p = Polynomial::zero(&v);
        for ((a, b), c, root) in terms {
            let coeff = if root { &Cyc::from_int(c) * &Cyc::zeta(3) } else { Cyc::from_int(c) };
            p = &p + &Polynomial::monomial(&v, Monomial::new(vec![a, b]), coeff);
        }
        p
    })
}

fn linear_factor() -> impl Strategy<Value = Polynomial> {
    (1i64..=3, -2i64..=2).prop_map(|(a, b)| {
        let v = zv();
        &Polynomial::var(&v, "z1").unwrap().scale(&Cyc::from_int(a)) + &Polynomial::var(&v, "z2").unwrap().scale(&Cyc::from_int(b))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclotomic_ring_axioms(a in cyc(), b in cyc(), c in cyc()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert!((&a * &a.inv().unwrap()).is_one());
        }
    }

    #[test]
    fn polynomial_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
    }

    #[test]
    fn leibniz_rule(a in poly(), b in poly()) {
        for x in ["z1", "z2"] {
            prop_assert_eq!((&a * &b).partial(x), &(&a.partial(x) * &b) + &(&a * &b.partial(x)));
        }
    }

    #[test]
    fn multiplicity_adds_powers(p in poly(), h in linear_factor(), k in 0u32..=5) {
        let base = p.multiplicity(&h).unwrap();
        let got = (&p * &h.pow(k)).multiplicity(&h).unwrap();
        prop_assert_eq!(got, base + k as i64);
    }

    #[test]
    fn exact_divide_round_trip(p in poly(), h in poly()) {
        prop_assume!(!h.is_zero());
        if let Some(q) = p.exact_divide(&h).unwrap() {
            prop_assert_eq!(&q * &h, p.clone());
        }
        let prod = &p * &h;
        prop_assert_eq!(prod.exact_divide(&h).unwrap(), Some(p));
    }

    #[test]
    fn order_of_sum_bounded_below(a in poly(), b in poly(), c in poly(), d in poly(), h in linear_factor(), i in 0u32..3, j in 0u32..3) {
        prop_assume!(!c.is_zero() && !d.is_zero());
        let f = RationalFunction::new(a, &c * &h.pow(i)).unwrap();
        let g = RationalFunction::new(b, &d * &h.pow(j)).unwrap();
        let lhs = rat_order(&(&f + &g), &h).unwrap();
        let rhs = rat_order(&f, &h).unwrap().min(rat_order(&g, &h).unwrap());
        prop_assert!(lhs >= rhs, "{} < {}", lhs, rhs);
    }
}

#[test]
fn roots_of_unity_and_cyclotomic_polynomials() {
    for n in 1..=24u32 {
        let z = Cyc::zeta(n);
        assert!(z.pow(n as i64).unwrap().is_one(), "zeta({n})^{n}");
        let phi = field(n).cyclotomic_polynomial().to_vec();
        let mut acc = Cyc::zero();
        for (k, c) in phi.iter().enumerate() {
            let c = Cyc::from_rational(BigRational::from_integer(c.clone()));
            acc = &acc + &(&c * &z.pow(k as i64).unwrap());
        }
        assert!(acc.is_zero(), "Phi_{n}(zeta) != 0");
    }
}

#[test]
fn spec_examples_for_orders() {
    let yv = vars(&["y"]);
    let y = Polynomial::var(&yv, "y").unwrap();
    let one = Polynomial::one(&yv);
    assert_eq!((&y.pow(3) * &(&y + &one)).multiplicity(&y).unwrap(), Order::Finite(3));
    assert_eq!(Polynomial::zero(&yv).multiplicity(&y).unwrap(), Order::Infinite);
    assert_eq!((&y + &one).multiplicity(&y).unwrap(), Order::Finite(0));
    let inv = RationalFunction::new(one.clone(), y.clone()).unwrap();
    assert_eq!(rat_order(&inv, &y).unwrap(), Order::Finite(-1));
    let f = RationalFunction::new(y.pow(2), &y + &one).unwrap();
    assert_eq!(rat_order(&f, &y).unwrap(), Order::Finite(2));
    assert_eq!(rat_order(&RationalFunction::zero(&yv), &y).unwrap(), Order::Infinite);
    assert!(y.multiplicity(&one).is_err());
}

#[test]
fn spec_examples_for_polynomials() {
    let zv = vars(&["z"]);
    let z = Polynomial::var(&zv, "z").unwrap();
    for r in 1..=6u32 {
        assert_eq!(z.pow(r).partial("z"), z.pow(r - 1).scale(&Cyc::from_int(r as i64)));
    }
    let yv = vars(&["y"]);
    let y = Polynomial::var(&yv, "y").unwrap();
    assert_eq!(y.pow(2).compose_all(&[z.pow(3)]), z.pow(6));
    let one = Polynomial::one(&zv);
    assert_eq!((&z.pow(2) - &one).exact_divide(&(&z - &one)).unwrap(), Some(&z + &one));
    assert_eq!(z.exact_divide(&z.pow(2)).unwrap(), None);
    assert!(z.exact_divide(&Polynomial::zero(&zv)).is_err());
}
