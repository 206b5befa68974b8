#![allow(dead_code)]

use orbilift::algebra::{CyclotomicNumber as Cyc, Monomial, Polynomial, RationalFunction, Vars};
use orbilift::group::FiniteMatrixGroup;
use orbilift::tensor::{ChristoffelConnection, TensorField};
use rand::rngs::StdRng;
use rand::Rng;

/// Random polynomial with up to `terms` terms of total degree `<= max_deg`
/// and small integer coefficients.
pub fn random_poly(rng: &mut StdRng, v: &Vars, max_deg: u32, terms: usize) -> Polynomial {
    let mut p = Polynomial::zero(v);
    for _ in 0..terms {
        let mut left = rng.gen_range(0..=max_deg);
        let mut exps = vec![0u32; v.len()];
        for e in exps.iter_mut() {
            let k = rng.gen_range(0..=left);
            *e = k;
            left -= k;
        }
        let c = rng.gen_range(-3i64..=3);
        p = &p + &Polynomial::monomial(v, Monomial::new(exps), Cyc::from_int(c));
    }
    p
}

/// Random connection on `z` whose `(a, b, c)` component only has monomials
/// with last exponent `≡ [a = n] − [b = n] − [c = n] (mod r)`, i.e. one
/// invariant under `diag(1, …, 1, ζ_r)`.
pub fn random_invariant_connection(rng: &mut StdRng, z: &Vars, r: u32, max_deg: u32) -> ChristoffelConnection {
    let n = z.len();
    let last = n - 1;
    let mut g = ChristoffelConnection::zero(z);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let w = (a == last) as i64 - (b == last) as i64 - (c == last) as i64;
                let want = w.rem_euclid(r as i64) as u32;
                let p = random_poly(rng, z, max_deg, 4);
                let kept = Polynomial::from_terms(
                    z,
                    p.terms()
                        .iter()
                        .filter(|(m, _)| m.exponent(last) % r == want)
                        .map(|(m, c)| (m.clone(), c.clone())),
                );
                g.set((a, b, c), RationalFunction::from_poly(kept)).unwrap();
            }
        }
    }
    g
}

/// Group average of a tensor field under the pushforward action.
pub fn average(group: &FiniteMatrixGroup, t: &TensorField) -> TensorField {
    let mut acc = TensorField::zero(t.p(), t.q(), t.coords());
    for g in group.elements() {
        acc = acc.add(&t.act(g).unwrap()).unwrap();
    }
    acc.scale(&Cyc::from_ratio(1, group.order() as i64))
}

fn increasing_tuples(n: usize, q: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == q {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, q, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, q, &mut Vec::new(), &mut out);
    out
}

/// Random polynomial skew `q`-form `Σ f_I dz_I` averaged over the group.
pub fn random_invariant_form(rng: &mut StdRng, group: &FiniteMatrixGroup, q: usize, max_deg: u32) -> TensorField {
    let z = group.coords();
    let mut omega = TensorField::zero(0, q, z);
    for tuple in increasing_tuples(z.len(), q) {
        let f = random_poly(rng, z, max_deg, 3);
        let mut basis = TensorField::scalar(z, RationalFunction::one(z)).unwrap();
        for &i in &tuple {
            basis = basis.wedge(&TensorField::covector(z, &z[i]).unwrap()).unwrap();
        }
        omega = omega.add(&basis.mul_function(&f.into()).unwrap()).unwrap();
    }
    average(group, &omega)
}
