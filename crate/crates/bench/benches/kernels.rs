use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use orbilift::algebra::vars;
use orbilift::group::{close, cyclic, diagonal_cyclic, symmetric, GroupElement};
use orbilift::invariants::generators;
use orbilift::lift::{cross_validate, cyclic_test_tensor, default_series, thm37_sweep, AdaptedChart};
use orbilift::{CyclotomicNumber, OrbitMap, Polynomial};
use std::hint::black_box;

fn dense(vs: &orbilift::Vars, deg: u32) -> Polynomial {
    let one = Polynomial::one(vs);
    let sum = vs
        .iter()
        .map(|v| Polynomial::var(vs, v).unwrap())
        .fold(one, |acc, x| &acc + &x);
    sum.pow(deg)
}

fn poly_mul(c: &mut Criterion) {
    let vs = vars(&["a", "b", "c"]);
    let mut g = c.benchmark_group("poly_mul");
    for deg in [4u32, 8] {
        let f = dense(&vs, deg);
        g.bench_with_input(BenchmarkId::from_parameter(deg), &f, |b, f| b.iter(|| black_box(f * f)));
    }
    g.finish();
}

fn closure(c: &mut Criterion) {
    let mut g = c.benchmark_group("closure");
    for n in [3usize, 4] {
        let mut gens = vec![GroupElement::permutation(&(1..n).chain([0]).collect::<Vec<_>>())];
        let mut swap: Vec<usize> = (0..n).collect();
        swap.swap(0, 1);
        gens.push(GroupElement::permutation(&swap));
        g.bench_with_input(BenchmarkId::new("symmetric", n), &gens, |b, gens| {
            b.iter(|| close(gens.clone(), 1000).unwrap())
        });
    }
    let zeta = CyclotomicNumber::zeta(5);
    let gens = vec![
        GroupElement::diagonal(vec![zeta.clone(), CyclotomicNumber::one()]),
        GroupElement::diagonal(vec![CyclotomicNumber::one(), zeta]),
    ];
    g.bench_function("diagonal_5x5", |b| b.iter(|| close(gens.clone(), 1000).unwrap()));
    g.finish();
}

fn invariant_generators(c: &mut Criterion) {
    let mut g = c.benchmark_group("invariant_generators");
    let s3 = symmetric(3).unwrap();
    g.bench_function("S3", |b| b.iter(|| generators(black_box(&s3)).unwrap()));
    let d = diagonal_cyclic(&[2, 3]).unwrap();
    g.bench_function("Z2xZ3", |b| b.iter(|| generators(black_box(&d)).unwrap()));
    g.finish();
}

fn lift_routes(c: &mut Criterion) {
    let series = default_series();
    let z4 = cyclic(4).unwrap();
    let sigma = OrbitMap::of_group(&z4).unwrap();
    let chart = AdaptedChart::from_orbit_map(&sigma).unwrap();
    let t = cyclic_test_tensor(&series[0], 2, 1, 1).unwrap();
    c.bench_function("cross_validate_Z4", |b| {
        b.iter(|| cross_validate(black_box(&t), &sigma, &z4, &chart).unwrap())
    });
    let mut g = c.benchmark_group("route_sweep");
    g.sample_size(10);
    g.bench_function("r<=4,pq<=1,m-2..2", |b| {
        b.iter(|| thm37_sweep(2..=4, 1, -2..=2, &series).unwrap())
    });
    g.finish();
}

criterion_group!(benches, poly_mul, closure, invariant_generators, lift_routes);
criterion_main!(benches);
