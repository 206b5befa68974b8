//! Finite matrix groups: closure from generators, complex reflections and
//! reflection hyperplanes with their stabilizer orders.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;

use crate::algebra::cyclotomic::{common_conductor, CyclotomicNumber as Cyc, DEFAULT_CONDUCTOR_MAX};
use crate::algebra::{vars, Matrix, Monomial, Polynomial, Vars};
use crate::error::{Error, Result};

/// Default bound on the number of enumerated elements.
pub const DEFAULT_CAP: usize = 10_000;

/// An invertible square matrix of finite order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement(Matrix);

impl GroupElement {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::DimensionMismatch {
                expected: m.rows(),
                found: m.cols(),
            });
        }
        Ok(GroupElement(m))
    }

    pub fn from_rows(rows: Vec<Vec<Cyc>>) -> Result<Self> {
        GroupElement::new(Matrix::from_rows(rows)?)
    }

    pub fn diagonal(entries: Vec<Cyc>) -> Self {
        GroupElement(Matrix::diagonal(entries))
    }

    pub fn identity(n: usize) -> Self {
        GroupElement(Matrix::identity(n))
    }

    /// Permutation matrix sending basis vector `e_j` to `e_{perm[j]}`.
    pub fn permutation(perm: &[usize]) -> Self {
        let n = perm.len();
        let mut m = Matrix::zeros(n, n);
        for (j, &i) in perm.iter().enumerate() {
            m.set(i, j, Cyc::one());
        }
        GroupElement(m)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dimension(&self) -> usize {
        self.0.rows()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    pub fn inverse(&self) -> GroupElement {
        GroupElement(self.0.inverse().expect("group elements are invertible"))
    }

    pub fn compose(&self, other: &GroupElement) -> GroupElement {
        GroupElement(&self.0 * &other.0)
    }

    pub fn pow(&self, e: u32) -> GroupElement {
        (0..e).fold(GroupElement::identity(self.dimension()), |acc, _| acc.compose(self))
    }

    /// Smallest `k >= 1` with `g^k = I`, searched up to `bound`.
    pub fn order(&self, bound: usize) -> Option<usize> {
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_identity() {
                return Some(k);
            }
            acc = acc.compose(self);
        }
        None
    }

    /// `rank(g - I)`, the codimension of the fixed space.
    pub fn moved_rank(&self) -> usize {
        (&self.0 - &Matrix::identity(self.dimension())).rank()
    }

    pub fn is_reflection(&self) -> bool {
        !self.is_identity() && self.moved_rank() == 1
    }

    fn key(&self, conductor: u32) -> Vec<BigRational> {
        self.0
            .entries()
            .iter()
            .flat_map(|e| e.coords_in(conductor))
            .collect()
    }

    fn conductor(&self) -> u32 {
        common_conductor(self.0.entries())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Limits applied while enumerating a group.
#[derive(Clone, Copy, Debug)]
pub struct ClosureOptions {
    pub cap: usize,
    pub conductor_max: u32,
}

impl Default for ClosureOptions {
    fn default() -> Self {
        ClosureOptions {
            cap: DEFAULT_CAP,
            conductor_max: DEFAULT_CONDUCTOR_MAX,
        }
    }
}

/// A fully enumerated finite subgroup of GL(n).
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    dimension: usize,
    conductor: u32,
    coords: Vars,
    generators: Vec<GroupElement>,
    elements: Vec<GroupElement>,
}

/// A reflection hyperplane `{linear_form = 0}` with the order `label` of
/// its cyclic pointwise stabilizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReflectionHyperplane {
    pub linear_form: Polynomial,
    pub label: u32,
    pub stabilizer_generator: GroupElement,
}

/// Default coordinate names: `z` in dimension one, `z1 … zn` otherwise.
pub fn default_coords(prefix: &str, n: usize) -> Vars {
    if n == 1 {
        vars(&[prefix])
    } else {
        let names: Vec<String> = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        vars(&names)
    }
}

/// Breadth-first closure of the generators under multiplication.
pub fn close(generators: Vec<GroupElement>, cap: usize) -> Result<FiniteMatrixGroup> {
    close_with(
        generators,
        ClosureOptions {
            cap,
            ..ClosureOptions::default()
        },
    )
}

pub fn close_with(generators: Vec<GroupElement>, opts: ClosureOptions) -> Result<FiniteMatrixGroup> {
    let n = generators
        .first()
        .map(GroupElement::dimension)
        .ok_or_else(|| Error::InvalidArgument("at least one generator required".into()))?;
    if let Some(bad) = generators.iter().find(|g| g.dimension() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: bad.dimension(),
        });
    }
    let conductor = generators.iter().fold(1u32, |acc, g| acc.lcm(&g.conductor()));
    if conductor > opts.conductor_max {
        return Err(Error::ConductorTooLarge {
            conductor,
            max: opts.conductor_max,
        });
    }
    for g in &generators {
        if g.0.rank() < n {
            return Err(Error::InvalidArgument(format!("generator {g} is singular")));
        }
    }

    let id = GroupElement::identity(n);
    let mut seen: HashMap<Vec<BigRational>, usize> = HashMap::new();
    let mut elements = vec![id.clone()];
    seen.insert(id.key(conductor), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in &generators {
            let h = elements[i].compose(g);
            let key = h.key(conductor);
            if seen.contains_key(&key) {
                continue;
            }
            if elements.len() >= opts.cap {
                return Err(Error::GroupTooLarge { cap: opts.cap });
            }
            seen.insert(key, elements.len());
            queue.push_back(elements.len());
            elements.push(h);
        }
    }
    Ok(FiniteMatrixGroup {
        dimension: n,
        conductor,
        coords: default_coords("z", n),
        generators,
        elements,
    })
}

impl FiniteMatrixGroup {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Least common multiple of the conductors of all matrix entries.
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coords(&self) -> &Vars {
        &self.coords
    }

    pub fn with_coords(mut self, coords: Vars) -> Result<Self> {
        if coords.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: coords.len(),
            });
        }
        self.coords = coords;
        Ok(self)
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    /// All elements; the identity comes first.
    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.elements.contains(g)
    }

    /// Every non-identity element fixing a hyperplane pointwise.
    pub fn reflections(&self) -> Vec<GroupElement> {
        self.elements
            .iter()
            .filter(|g| g.is_reflection())
            .cloned()
            .collect()
    }

    /// Reflection hyperplanes with their labels `e_H`.
    pub fn hyperplanes(&self) -> Result<Vec<ReflectionHyperplane>> {
        let mut groups: Vec<(Vec<Cyc>, Vec<GroupElement>)> = Vec::new();
        for r in self.reflections() {
            let form = reflection_form(&r);
            match groups.iter_mut().find(|(f, _)| *f == form) {
                Some((_, members)) => members.push(r),
                None => groups.push((form, vec![r])),
            }
        }
        let mut out = Vec::with_capacity(groups.len());
        for (form, members) in groups {
            let label = members.len() + 1;
            let generator = members
                .iter()
                .find(|g| g.order(label) == Some(label))
                .cloned()
                .ok_or_else(|| {
                    Error::Internal(format!(
                        "pointwise stabilizer of order {label} is not cyclic"
                    ))
                })?;
            let linear_form = Polynomial::from_terms(
                &self.coords,
                form.into_iter()
                    .enumerate()
                    .map(|(i, c)| (Monomial::var(i, 1), c)),
            );
            out.push(ReflectionHyperplane {
                linear_form,
                label: label as u32,
                stabilizer_generator: generator,
            });
        }
        out.sort_by(|a, b| {
            let ka: Vec<&Monomial> = a.linear_form.terms().keys().rev().collect();
            let kb: Vec<&Monomial> = b.linear_form.terms().keys().rev().collect();
            kb.cmp(&ka)
                .then_with(|| a.linear_form.to_string().cmp(&b.linear_form.to_string()))
        });
        Ok(out)
    }

    /// True when the group is generated by its reflections.
    pub fn is_reflection_group(&self) -> bool {
        self.reflection_subgroup().order() == self.order()
    }

    /// Subgroup generated by all reflections (trivial when there are none).
    pub fn reflection_subgroup(&self) -> FiniteMatrixGroup {
        let mut gens = self.reflections();
        if gens.is_empty() {
            gens.push(GroupElement::identity(self.dimension));
        }
        let mut sub = close_with(
            gens,
            ClosureOptions {
                cap: self.order() + 1,
                conductor_max: u32::MAX,
            },
        )
        .expect("subgroup of a finite group");
        sub.coords = self.coords.clone();
        sub
    }

    pub fn is_diagonal(&self) -> bool {
        self.elements.iter().all(|g| g.matrix().is_diagonal())
    }
}

/// Normalized defining linear form of the fixed hyperplane of a
/// reflection: the first nonzero row of `g - I`, scaled so its first
/// nonzero coefficient is 1.
fn reflection_form(g: &GroupElement) -> Vec<Cyc> {
    let n = g.dimension();
    let a = g.matrix() - &Matrix::identity(n);
    let row = (0..n)
        .map(|i| a.row(i).to_vec())
        .find(|r| r.iter().any(|x| !x.is_zero()))
        .expect("reflection moves something");
    let lead = row.iter().find(|x| !x.is_zero()).unwrap().inv().unwrap();
    row.iter().map(|x| x * &lead).collect()
}

/// ⟨diag(ζ_r)⟩ acting on C.
pub fn cyclic(r: u32) -> Result<FiniteMatrixGroup> {
    close(vec![GroupElement::diagonal(vec![Cyc::zeta(r)])], DEFAULT_CAP)
}

/// Z_{r_1} × … × Z_{r_n} acting diagonally on C^n, one reflection
/// generator per coordinate with `r_k >= 2`.
pub fn diagonal_cyclic(orders: &[u32]) -> Result<FiniteMatrixGroup> {
    let n = orders.len();
    let mut gens = Vec::new();
    for (k, &r) in orders.iter().enumerate() {
        if r < 2 {
            continue;
        }
        let mut d = vec![Cyc::one(); n];
        d[k] = Cyc::zeta(r);
        gens.push(GroupElement::diagonal(d));
    }
    if gens.is_empty() {
        gens.push(GroupElement::identity(n));
    }
    close(gens, DEFAULT_CAP)
}

/// The symmetric group S_n permuting coordinates of C^n.
pub fn symmetric(n: usize) -> Result<FiniteMatrixGroup> {
    if n < 2 {
        return close(vec![GroupElement::identity(n.max(1))], DEFAULT_CAP);
    }
    let gens = (0..n - 1)
        .map(|i| {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, i + 1);
            GroupElement::permutation(&p)
        })
        .collect();
    close(gens, DEFAULT_CAP)
}

/// Scalar group ⟨ζ_r · I⟩ on C^n.
pub fn scalar(n: usize, r: u32) -> Result<FiniteMatrixGroup> {
    close(
        vec![GroupElement::diagonal(vec![Cyc::zeta(r); n])],
        DEFAULT_CAP,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> Cyc {
        Cyc::from_int(v)
    }

    #[test]
    fn scalar_cyclic_order_three() {
        let g = scalar(2, 3).unwrap();
        assert_eq!(g.order(), 3);
    }

    #[test]
    fn two_transpositions_generate_s3() {
        let g = symmetric(3).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.reflections().len(), 3);
        assert!(g.is_reflection_group());
        assert!(!g.is_diagonal());
    }

    #[test]
    fn infinite_order_hits_cap() {
        let g = GroupElement::diagonal(vec![c(2)]);
        assert_eq!(close(vec![g], 100).unwrap_err(), Error::GroupTooLarge { cap: 100 });
    }

    #[test]
    fn minus_identity_has_no_reflections() {
        let g = scalar(2, 2).unwrap();
        assert!(g.reflections().is_empty());
        assert!(g.hyperplanes().unwrap().is_empty());
        assert!(!g.is_reflection_group());
    }

    #[test]
    fn diag_one_zeta() {
        for r in 2..=6u32 {
            let g = close(
                vec![GroupElement::diagonal(vec![c(1), Cyc::zeta(r)])],
                DEFAULT_CAP,
            )
            .unwrap();
            assert_eq!(g.reflections().len(), r as usize - 1);
            let hs = g.hyperplanes().unwrap();
            assert_eq!(hs.len(), 1);
            assert_eq!(hs[0].label, r);
            assert_eq!(hs[0].linear_form, Polynomial::var(g.coords(), "z2").unwrap());
        }
    }

    #[test]
    fn swap_hyperplane() {
        let g = symmetric(2).unwrap();
        let hs = g.hyperplanes().unwrap();
        assert_eq!(hs.len(), 1);
        assert_eq!(hs[0].label, 2);
        let z = g.coords();
        let expect = &Polynomial::var(z, "z1").unwrap() - &Polynomial::var(z, "z2").unwrap();
        assert_eq!(hs[0].linear_form, expect);
    }

    #[test]
    fn diagonal_checks() {
        let g = close(
            vec![GroupElement::diagonal(vec![Cyc::zeta(2), Cyc::zeta(3)])],
            DEFAULT_CAP,
        )
        .unwrap();
        assert!(g.is_diagonal());
        let trivial = close(vec![GroupElement::identity(2)], DEFAULT_CAP).unwrap();
        assert!(trivial.is_diagonal());
        assert!(trivial.is_reflection_group());
        let refl = close(vec![GroupElement::diagonal(vec![Cyc::zeta(2), c(1)])], DEFAULT_CAP).unwrap();
        assert!(refl.is_reflection_group());
    }

    #[test]
    fn conductor_cap_enforced() {
        let g = GroupElement::diagonal(vec![Cyc::zeta(25)]);
        let err = close_with(vec![g], ClosureOptions::default()).unwrap_err();
        assert_eq!(err, Error::ConductorTooLarge { conductor: 25, max: 24 });
    }

    #[test]
    fn stabilizer_generators_fix_their_hyperplane() {
        let g = symmetric(3).unwrap();
        for h in g.hyperplanes().unwrap() {
            let s = &h.stabilizer_generator;
            let a = s.matrix() - &Matrix::identity(3);
            // every vector on the hyperplane is fixed
            let form: Vec<Cyc> = (0..3)
                .map(|i| h.linear_form.coeff(&Monomial::var(i, 1)))
                .collect();
            let plane = Matrix::from_rows(vec![form]).unwrap().kernel();
            for v in plane {
                assert!(a.apply(&v).iter().all(Cyc::is_zero));
            }
        }
    }
}
