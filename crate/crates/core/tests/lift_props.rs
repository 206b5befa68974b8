mod common;

use orbilift::algebra::{vars, CyclotomicNumber as Cyc, Polynomial, RationalFunction, Vars};
use orbilift::connection_lift::{check_liftable_connection, pushforward_connection_slice, AdaptedConnectionPattern};
use orbilift::group::{diagonal_cyclic, scalar};
use orbilift::invariants::OrbitMap;
use orbilift::lift::{cross_validate, decide_lift_adapted, lift_via_pullback, AdaptedChart, LiftFailure};
use orbilift::tensor::{connection_pullback, connection_transform, ChristoffelConnection, PolyMap, TensorField};
use orbilift::Error;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Random tensor on `y` whose components are monomials with exponents in
/// `-2..=3`, possibly multiplied by `1 + y1`.
fn random_meromorphic(rng: &mut StdRng, y: &Vars, p: usize, q: usize) -> TensorField {
    let n = y.len();
    let mut comps = Vec::new();
    for _ in 0..rng.gen_range(1..=3) {
        let idx: Vec<usize> = (0..p + q).map(|_| rng.gen_range(0..n)).collect();
        let mut num = Polynomial::from_int(y, rng.gen_range(1..=3));
        let mut den = Polynomial::one(y);
        for k in 0..n {
            let e: i32 = rng.gen_range(-2..=3);
            let v = Polynomial::var_at(y, k);
            if e >= 0 {
                num = &num * &v.pow(e as u32);
            } else {
                den = &den * &v.pow((-e) as u32);
            }
        }
        if rng.gen_bool(0.5) {
            num = &num * &(&Polynomial::one(y) + &Polynomial::var_at(y, 0));
        }
        comps.push((idx, RationalFunction::new(num, den).unwrap()));
    }
    TensorField::from_components(p, q, y, comps).unwrap()
}

#[test]
fn routes_agree_on_two_factor_diagonal_groups() {
    let mut rng = StdRng::seed_from_u64(37);
    let mut seen = [0usize; 2];
    for r1 in 2..=4 {
        for r2 in 2..=4 {
            let g = diagonal_cyclic(&[r1, r2]).unwrap();
            let sigma = OrbitMap::of_group(&g).unwrap();
            let chart = AdaptedChart::from_orbit_map(&sigma).unwrap();
            for _ in 0..8 {
                let (p, q) = [(0, 1), (1, 0), (1, 1), (0, 2), (2, 0)][rng.gen_range(0..5)];
                let t = random_meromorphic(&mut rng, sigma.target_vars(), p, q);
                assert!(cross_validate(&t, &sigma, &g, &chart).unwrap(), "Z{r1} x Z{r2}: {t}");
                let cert = decide_lift_adapted(&t, &chart, &[]).unwrap();
                seen[cert.lifts() as usize] += 1;
                if let Some(l) = &cert.lifted {
                    let back = l.permute_coords(g.coords()).unwrap();
                    assert!(back.is_holomorphic());
                    assert!(back.is_invariant(&g).unwrap());
                }
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "both verdicts exercised: {seen:?}");
}

#[test]
fn pullback_certificates_are_invariant() {
    let mut rng = StdRng::seed_from_u64(41);
    let g = diagonal_cyclic(&[3, 2]).unwrap();
    let sigma = OrbitMap::of_group(&g).unwrap();
    for _ in 0..20 {
        let t = random_meromorphic(&mut rng, sigma.target_vars(), 1, 1);
        let cert = lift_via_pullback(&t, &sigma, &g).unwrap();
        match (&cert.lifted, &cert.failure) {
            (Some(l), None) => assert!(l.is_holomorphic() && l.is_invariant(&g).unwrap()),
            (None, Some(LiftFailure::Pole { .. })) => {}
            other => panic!("inconsistent certificate {other:?}"),
        }
    }
}

#[test]
fn no_hyperplanes_means_only_off_strata_conditions() {
    let g = scalar(2, 2).unwrap();
    let chart = AdaptedChart::for_diagonal_group(&g).unwrap();
    assert!(chart.strata().is_empty());
    let y = chart.orbit_coords().clone();
    let y1 = Polynomial::var(&y, "y1").unwrap();
    let t = TensorField::covector(&y, "y2").unwrap().mul_function(&y1.clone().into()).unwrap();
    assert!(decide_lift_adapted(&t, &chart, &[]).unwrap().lifts());
    let polar = TensorField::covector(&y, "y2")
        .unwrap()
        .mul_function(&RationalFunction::new(Polynomial::one(&y), y1.clone()).unwrap())
        .unwrap();
    assert!(matches!(decide_lift_adapted(&polar, &chart, &[]), Err(Error::CannotCertify(_))));
    let cert = decide_lift_adapted(&polar, &chart, &[y1]).unwrap();
    assert!(matches!(cert.failure, Some(LiftFailure::OffStrata { order: -1, .. })));
}

#[test]
fn slice_formulas_match_the_transformation_law() {
    let mut rng = StdRng::seed_from_u64(4242);
    for trial in 0..15 {
        let n = rng.gen_range(1..=3usize);
        let r = rng.gen_range(2..=4u32);
        let pat = AdaptedConnectionPattern::standard(r, n).unwrap();
        let big = common::random_invariant_connection(&mut rng, pat.slice_coords(), r, 4);
        let small = pushforward_connection_slice(&big, &pat).unwrap();
        assert!(check_liftable_connection(&small, &pat).unwrap().liftable);

        let exps: Vec<u32> = (0..n).map(|k| if k == n - 1 { r } else { 1 }).collect();
        let sigma = PolyMap::monomial(pat.slice_coords().clone(), pat.orbit_coords().clone(), &exps).unwrap();
        let oracle = connection_transform(&big, &sigma).unwrap();
        let images: Vec<Polynomial> = sigma.components().to_vec();
        let ours = small.substitute(&images, pat.slice_coords()).unwrap();
        assert_eq!(ours, oracle, "trial {trial}: n = {n}, r = {r}");
        assert_eq!(connection_pullback(&small, &sigma).unwrap(), big, "trial {trial}");
    }
}

#[test]
fn pole_pattern_survives_unit_rescaling() {
    let mut rng = StdRng::seed_from_u64(99);
    for r in 2..=4u32 {
        let pat = AdaptedConnectionPattern::standard(r, 2).unwrap();
        let big = common::random_invariant_connection(&mut rng, pat.slice_coords(), r, 3);
        let small = pushforward_connection_slice(&big, &pat).unwrap();
        // y1 = w1, y2 = (1 + w1) w2
        let w = vars(&["w1", "w2"]);
        let w1 = Polynomial::var(&w, "w1").unwrap();
        let w2 = Polynomial::var(&w, "w2").unwrap();
        let psi = PolyMap::new(
            w.clone(),
            pat.orbit_coords().clone(),
            vec![w1.clone(), &(&Polynomial::one(&w) + &w1) * &w2],
        )
        .unwrap();
        let moved = connection_pullback(&small, &psi).unwrap();
        let residue = RationalFunction::new(
            Polynomial::from_int(&w, r as i64 - 1),
            w2.scale(&Cyc::from_int(r as i64)),
        )
        .unwrap();
        let shifted = &moved.get(1, 1, 1) + &residue;
        assert!(shifted.order_along(&w2).unwrap().finite().is_none_or(|o| o >= 0), "r = {r}");
        let moved_pat = AdaptedConnectionPattern::new(r, w.clone(), pat.slice_coords().clone()).unwrap();
        let check = check_liftable_connection(&moved.cancel(&[&Polynomial::one(&w) + &w1]), &moved_pat).unwrap();
        let poles_only_at_unit = check
            .violations()
            .all(|d| moved.get(d.index.0, d.index.1, d.index.2).order_along(&w2).unwrap().finite().is_none_or(|o| o >= -1));
        assert!(poles_only_at_unit);
    }
}

#[test]
fn flat_pushdown_in_two_dimensions() {
    let pat = AdaptedConnectionPattern::standard(3, 2).unwrap();
    let small = pushforward_connection_slice(&ChristoffelConnection::zero(pat.slice_coords()), &pat).unwrap();
    let y = pat.orbit_coords();
    let y2 = Polynomial::var(y, "y2").unwrap();
    let want = RationalFunction::new(Polynomial::from_int(y, -2), y2.scale(&Cyc::from_int(3))).unwrap();
    assert_eq!(small.components().len(), 1);
    assert_eq!(small.get(1, 1, 1), want);
}
