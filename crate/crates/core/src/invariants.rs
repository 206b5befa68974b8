//! Invariant ring generators, the orbit map and its Jacobian.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::algebra::cyclotomic::CyclotomicNumber as Cyc;
use crate::algebra::linalg::{poly_det, PolyMatrix};
use crate::algebra::{EchelonBasis, Monomial, Polynomial, Vars};
use crate::error::{Error, Result};
use crate::group::{default_coords, FiniteMatrixGroup, GroupElement};
use crate::tensor::PolyMap;

/// Homogeneous generators of C[V]^G, sorted by degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantBasis {
    generators: Vec<Polynomial>,
    degrees: Vec<u32>,
}

impl InvariantBasis {
    pub fn generators(&self) -> &[Polynomial] {
        &self.generators
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }
}

/// `f ∘ g`, i.e. `z ↦ f(g·z)`.
pub fn compose_linear(f: &Polynomial, g: &GroupElement, coords: &Vars) -> Result<Polynomial> {
    let f = f.with_vars(coords)?;
    Ok(f.compose_all(&g.matrix().linear_forms(coords)))
}

/// Average of `f ∘ g` over the group.
pub fn reynolds(group: &FiniteMatrixGroup, f: &Polynomial) -> Result<Polynomial> {
    let coords = group.coords();
    let f = f.with_vars(coords)?;
    let mut acc = Polynomial::zero(coords);
    for g in group.elements() {
        acc = &acc + &f.compose_all(&g.matrix().linear_forms(coords));
    }
    Ok(acc.scale_rational(&BigRational::new(
        BigInt::from(1),
        BigInt::from(group.order()),
    )))
}

pub fn is_invariant_polynomial(group: &FiniteMatrixGroup, f: &Polynomial) -> Result<bool> {
    let coords = group.coords();
    let f = f.with_vars(coords)?;
    for g in group.generators() {
        if compose_linear(&f, g, coords)? != f {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All exponent vectors `a` with `Σ a_i · weights_i = d`.
pub(crate) fn weighted_exponents(weights: &[u32], d: u32) -> Vec<Vec<u32>> {
    fn go(weights: &[u32], i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == weights.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let w = weights[i];
        let max = if w == 0 { 0 } else { left / w };
        for a in 0..=max {
            cur.push(a);
            go(weights, i + 1, left - a * w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(weights, 0, d, &mut Vec::new(), &mut out);
    out
}

fn product(gens: &[Polynomial], exps: &[u32], coords: &Vars) -> Polynomial {
    gens.iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .fold(Polynomial::one(coords), |acc, (g, &e)| &acc * &g.pow(e))
}

struct DegreeSpace {
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl DegreeSpace {
    fn new(n: usize, d: u32) -> Self {
        let monomials = Monomial::all_of_degree(n, d);
        let index = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        DegreeSpace { monomials, index }
    }

    fn vector(&self, p: &Polynomial) -> Vec<Cyc> {
        let mut v = vec![Cyc::zero(); self.monomials.len()];
        for (m, c) in p.terms() {
            v[self.index[m]] = c.clone();
        }
        v
    }

    fn polynomial(&self, v: &[Cyc], coords: &Vars) -> Polynomial {
        Polynomial::from_terms(
            coords,
            self.monomials
                .iter()
                .zip(v)
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m.clone(), c.clone())),
        )
    }
}

/// Minimal homogeneous generators, degree by degree up to the Noether
/// bound `|G|`. The sweep stops early once `n` algebraically independent
/// generators with `∏ d_i = |G|` are found, since they then generate the
/// whole ring.
pub fn generators(group: &FiniteMatrixGroup) -> Result<InvariantBasis> {
    let n = group.dimension();
    let coords = group.coords().clone();
    let bound = group.order() as u32;
    let forms: Vec<Vec<Polynomial>> = group
        .elements()
        .iter()
        .map(|g| g.matrix().linear_forms(&coords))
        .collect();
    let scale = BigRational::new(BigInt::from(1), BigInt::from(group.order()));

    let mut gens: Vec<Polynomial> = Vec::new();
    let mut degrees: Vec<u32> = Vec::new();
    for d in 1..=bound {
        let space = DegreeSpace::new(n, d);
        let mut basis = EchelonBasis::new(space.monomials.len());
        for exps in weighted_exponents(&degrees, d) {
            basis.insert(&space.vector(&product(&gens, &exps, &coords)));
        }
        for m in &space.monomials {
            let mono = Polynomial::monomial(&coords, m.clone(), Cyc::one());
            let mut image = Polynomial::zero(&coords);
            for f in &forms {
                image = &image + &mono.compose_all(f);
            }
            if image.is_zero() {
                continue;
            }
            let image = image.scale_rational(&scale);
            if let Some(residual) = basis.insert(&space.vector(&image)) {
                let p = space.polynomial(&residual, &coords);
                let lc = p.leading_coeff().expect("nonzero residual").inv()?;
                gens.push(p.scale(&lc));
                degrees.push(d);
            }
        }
        if gens.len() == n && degrees.iter().map(|&x| x as u64).product::<u64>() == bound as u64 {
            let jac = jacobian_of(&gens, &coords);
            if !poly_det(&jac, &coords).is_zero() {
                break;
            }
        }
    }
    Ok(InvariantBasis {
        generators: gens,
        degrees,
    })
}

fn jacobian_of(components: &[Polynomial], coords: &Vars) -> PolyMatrix {
    components
        .iter()
        .map(|f| (0..coords.len()).map(|i| f.partial_at(i)).collect())
        .collect()
}

/// `σ = (σ^1, …, σ^m): V → C^m` built from an invariant basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitMap {
    basis: InvariantBasis,
    source_vars: Vars,
    target_vars: Vars,
}

impl OrbitMap {
    /// Target coordinates default to `y` (one generator) or `y1 … ym`.
    pub fn new(basis: InvariantBasis, source_vars: Vars) -> Result<Self> {
        let target = default_coords("y", basis.len());
        OrbitMap::with_target(basis, source_vars, target)
    }

    pub fn with_target(basis: InvariantBasis, source_vars: Vars, target_vars: Vars) -> Result<Self> {
        if target_vars.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: target_vars.len(),
            });
        }
        let generators = basis
            .generators
            .iter()
            .map(|g| g.with_vars(&source_vars))
            .collect::<Result<Vec<_>>>()?;
        Ok(OrbitMap {
            basis: InvariantBasis {
                generators,
                degrees: basis.degrees,
            },
            source_vars,
            target_vars,
        })
    }

    pub fn of_group(group: &FiniteMatrixGroup) -> Result<Self> {
        OrbitMap::new(generators(group)?, group.coords().clone())
    }

    pub fn basis(&self) -> &InvariantBasis {
        &self.basis
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.basis.generators
    }

    pub fn source_vars(&self) -> &Vars {
        &self.source_vars
    }

    pub fn target_vars(&self) -> &Vars {
        &self.target_vars
    }

    pub fn is_square(&self) -> bool {
        self.source_vars.len() == self.target_vars.len()
    }

    /// Entry `(a, i)` is `∂σ^a/∂z^i`.
    pub fn jacobian(&self) -> PolyMatrix {
        jacobian_of(self.components(), &self.source_vars)
    }

    pub fn jacobian_det(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::NonSquareOrbitMap {
                components: self.target_vars.len(),
                variables: self.source_vars.len(),
            });
        }
        Ok(poly_det(&self.jacobian(), &self.source_vars))
    }

    pub fn to_map(&self) -> Result<PolyMap> {
        PolyMap::new(
            self.source_vars.clone(),
            self.target_vars.clone(),
            self.components().to_vec(),
        )
    }
}

/// Writes an invariant polynomial as a polynomial in the orbit-map
/// coordinates, or `None` if it lies outside the generated subalgebra.
pub fn express_in_generators(f: &Polynomial, sigma: &OrbitMap) -> Result<Option<Polynomial>> {
    let coords = sigma.source_vars();
    let target = sigma.target_vars();
    let f = f.with_vars(coords)?;
    let mut out = Polynomial::zero(target);
    let Some(top) = f.total_degree() else {
        return Ok(Some(out));
    };
    let degrees = sigma.basis().degrees();
    for d in 0..=top {
        let part = f.homogeneous_component(d);
        if part.is_zero() {
            continue;
        }
        if d == 0 {
            out = &out + &Polynomial::constant(target, part.as_constant().unwrap());
            continue;
        }
        let space = DegreeSpace::new(coords.len(), d);
        let exps = weighted_exponents(degrees, d);
        let mut basis = EchelonBasis::new(space.monomials.len());
        for e in &exps {
            basis.insert(&space.vector(&product(sigma.components(), e, coords)));
        }
        let (residual, combo) = basis.reduce(&space.vector(&part));
        if residual.iter().any(|c| !c.is_zero()) {
            return Ok(None);
        }
        for (e, c) in exps.iter().zip(&combo) {
            if !c.is_zero() {
                out = &out + &Polynomial::monomial(target, Monomial::new(e.clone()), c.clone());
            }
        }
    }
    Ok(Some(out))
}
