use std::fmt;

use crate::algebra::linalg::{poly_adjugate, poly_det, PolyMatrix};
use crate::algebra::{Polynomial, Vars};
use crate::error::{Error, Result};

/// A polynomial map `x ↦ y = f(x)` between named coordinate charts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyMap {
    source: Vars,
    target: Vars,
    components: Vec<Polynomial>,
}

impl PolyMap {
    pub fn new(source: Vars, target: Vars, components: Vec<Polynomial>) -> Result<Self> {
        if components.len() != target.len() {
            return Err(Error::DimensionMismatch {
                expected: target.len(),
                found: components.len(),
            });
        }
        let components = components
            .iter()
            .map(|p| p.with_vars(&source))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap {
            source,
            target,
            components,
        })
    }

    pub fn identity(coords: &Vars) -> Self {
        PolyMap {
            source: coords.clone(),
            target: coords.clone(),
            components: (0..coords.len())
                .map(|i| Polynomial::var_at(coords, i))
                .collect(),
        }
    }

    /// `y_i = x_i^{e_i}`.
    pub fn monomial(source: Vars, target: Vars, exponents: &[u32]) -> Result<Self> {
        let comps = exponents
            .iter()
            .enumerate()
            .map(|(i, &e)| Polynomial::var_at(&source, i).pow(e))
            .collect();
        PolyMap::new(source, target, comps)
    }

    pub fn source(&self) -> &Vars {
        &self.source
    }

    pub fn target(&self) -> &Vars {
        &self.target
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn is_square(&self) -> bool {
        self.source.len() == self.target.len()
    }

    /// Entry `(a, i)` is `∂f^a/∂x^i`.
    pub fn jacobian(&self) -> PolyMatrix {
        self.components
            .iter()
            .map(|f| (0..self.source.len()).map(|i| f.partial_at(i)).collect())
            .collect()
    }

    pub fn jacobian_det(&self) -> Result<Polynomial> {
        if !self.is_square() {
            return Err(Error::NonSquareOrbitMap {
                components: self.target.len(),
                variables: self.source.len(),
            });
        }
        Ok(poly_det(&self.jacobian(), &self.source))
    }

    /// `(adj J, det J)` with `det J ≠ 0`, so that `J⁻¹ = adj J / det J`.
    pub fn inverse_jacobian(&self) -> Result<(PolyMatrix, Polynomial)> {
        let det = self.jacobian_det()?;
        if det.is_zero() {
            return Err(Error::DegenerateJacobian);
        }
        Ok((poly_adjugate(&self.jacobian(), &self.source), det))
    }

    /// `H[a][i][j] = ∂²f^a/∂x^i∂x^j`.
    pub fn hessians(&self) -> Vec<PolyMatrix> {
        let n = self.source.len();
        self.components
            .iter()
            .map(|f| {
                (0..n)
                    .map(|i| {
                        let fi = f.partial_at(i);
                        (0..n).map(|j| fi.partial_at(j)).collect()
                    })
                    .collect()
            })
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &PolyMap) -> Result<PolyMap> {
        if inner.target[..] != self.source[..] {
            return Err(Error::InvalidArgument(format!(
                "cannot compose: inner map lands in ({}) but outer map starts from ({})",
                inner.target.join(", "),
                self.source.join(", ")
            )));
        }
        PolyMap::new(
            inner.source.clone(),
            self.target.clone(),
            self.components
                .iter()
                .map(|f| f.compose_all(&inner.components))
                .collect(),
        )
    }

    /// Substitutes the map into a function of the target coordinates.
    pub fn apply(&self, f: &Polynomial) -> Result<Polynomial> {
        f.with_vars(&self.target)?.compose_all(&self.components).with_vars(&self.source)
    }

    pub fn is_identity(&self) -> bool {
        self.source[..] == self.target[..]
            && self
                .components
                .iter()
                .enumerate()
                .all(|(i, f)| *f == Polynomial::var_at(&self.source, i))
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .target
            .iter()
            .zip(&self.components)
            .map(|(y, c)| format!("{y} = {c}"))
            .collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{vars, CyclotomicNumber as Cyc};

    #[test]
    fn square_map_jacobian() {
        let x = vars(&["z"]);
        let y = vars(&["y"]);
        let f = PolyMap::monomial(x.clone(), y, &[3]).unwrap();
        let z = Polynomial::var(&x, "z").unwrap();
        assert_eq!(f.jacobian_det().unwrap(), z.pow(2).scale(&Cyc::from_int(3)));
        assert_eq!(f.hessians()[0][0][0], z.scale(&Cyc::from_int(6)));
    }

    #[test]
    fn composition_of_powers() {
        let a = vars(&["a"]);
        let b = vars(&["b"]);
        let c = vars(&["c"]);
        let f = PolyMap::monomial(b.clone(), c.clone(), &[2]).unwrap();
        let g = PolyMap::monomial(a.clone(), b, &[3]).unwrap();
        assert_eq!(f.compose(&g).unwrap(), PolyMap::monomial(a, c, &[6]).unwrap());
        assert!(g.compose(&f).is_err());
    }

    #[test]
    fn degenerate_jacobian_rejected() {
        let x = vars(&["x1", "x2"]);
        let y = vars(&["y1", "y2"]);
        let x1 = Polynomial::var(&x, "x1").unwrap();
        let f = PolyMap::new(x, y, vec![x1.clone(), x1]).unwrap();
        assert_eq!(f.inverse_jacobian().unwrap_err(), Error::DegenerateJacobian);
    }
}
