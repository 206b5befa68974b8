use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{Polynomial, RationalFunction, Vars};
use crate::error::{Error, Result};

use super::map::PolyMap;

/// Christoffel symbols `Γ^a_{bc}` keyed by `(a, b, c)`.
#[derive(Clone, Debug)]
pub struct ChristoffelConnection {
    coords: Vars,
    components: BTreeMap<(usize, usize, usize), RationalFunction>,
}

impl ChristoffelConnection {
    pub fn zero(coords: &Vars) -> Self {
        ChristoffelConnection {
            coords: coords.clone(),
            components: BTreeMap::new(),
        }
    }

    pub fn from_components(
        coords: &Vars,
        components: impl IntoIterator<Item = ((usize, usize, usize), RationalFunction)>,
    ) -> Result<Self> {
        let mut c = ChristoffelConnection::zero(coords);
        for (k, f) in components {
            c.set(k, f)?;
        }
        Ok(c)
    }

    pub fn coords(&self) -> &Vars {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    pub fn components(&self) -> &BTreeMap<(usize, usize, usize), RationalFunction> {
        &self.components
    }

    pub fn get(&self, a: usize, b: usize, c: usize) -> RationalFunction {
        self.components
            .get(&(a, b, c))
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(&self.coords))
    }

    /// Overwrites a component; zero removes it.
    pub fn set(&mut self, (a, b, c): (usize, usize, usize), f: RationalFunction) -> Result<()> {
        let n = self.dimension();
        if a >= n || b >= n || c >= n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: a.max(b).max(c) + 1,
            });
        }
        let f = f.with_vars(&self.coords)?;
        if f.is_zero() {
            self.components.remove(&(a, b, c));
        } else {
            self.components.insert((a, b, c), f);
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn is_holomorphic(&self) -> bool {
        self.components.values().all(RationalFunction::is_polynomial)
    }

    /// Composes every component with `images`, landing in `coords`.
    pub fn substitute(&self, images: &[Polynomial], coords: &Vars) -> Result<Self> {
        let mut out = ChristoffelConnection::zero(coords);
        for (&k, f) in &self.components {
            out.set(k, f.compose_all(images)?)?;
        }
        Ok(out)
    }

    pub fn with_coords(&self, coords: &Vars) -> Result<Self> {
        if coords.len() != self.dimension() {
            return Err(Error::DimensionMismatch {
                expected: self.dimension(),
                found: coords.len(),
            });
        }
        let images: Vec<Polynomial> = (0..coords.len()).map(|i| Polynomial::var_at(coords, i)).collect();
        self.substitute(&images, coords)
    }

    pub fn cancel(&self, factors: &[Polynomial]) -> Self {
        ChristoffelConnection {
            coords: self.coords.clone(),
            components: self
                .components
                .iter()
                .map(|(k, f)| (*k, f.cancel(factors)))
                .collect(),
        }
    }
}

impl PartialEq for ChristoffelConnection {
    fn eq(&self, other: &Self) -> bool {
        if self.coords[..] != other.coords[..] {
            return false;
        }
        let keys: std::collections::BTreeSet<_> =
            self.components.keys().chain(other.components.keys()).collect();
        keys.into_iter()
            .all(|&(a, b, c)| self.get(a, b, c) == other.get(a, b, c))
    }
}

impl Eq for ChristoffelConnection {}

impl fmt::Display for ChristoffelConnection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "{{}}");
        }
        let parts: Vec<String> = self
            .components
            .iter()
            .map(|(&(a, b, c), v)| {
                format!(
                    "[{}; {}, {}] = {}",
                    self.coords[a], self.coords[b], self.coords[c], v
                )
            })
            .collect();
        write!(f, "{{ {} }}", parts.join(", "))
    }
}

/// Image `γ` of a connection `Γ` on the source chart of `f` under `f`:
///
/// `γ^a_{bc}∘f = J^a_i (J⁻¹)^j_b (J⁻¹)^k_c Γ^i_{jk} − H^a_{ij} (J⁻¹)^i_b (J⁻¹)^j_c`.
///
/// The result is expressed in the source coordinates; its indices refer to
/// the target coordinates.
pub fn connection_transform(gamma: &ChristoffelConnection, f: &PolyMap) -> Result<ChristoffelConnection> {
    if gamma.coords()[..] != f.source()[..] {
        return Err(Error::InvalidArgument("connection must live on the source chart".into()));
    }
    let x = f.source();
    let n = x.len();
    let (adj, det) = f.inverse_jacobian()?;
    let jac = f.jacobian();
    let hess = f.hessians();

    // T^i_{bc} = adj^j_b adj^k_c Γ^i_{jk}, then J^a_i T^i_{bc}.
    let mut lowered: BTreeMap<(usize, usize, usize), RationalFunction> = BTreeMap::new();
    for (&(i, j, k), g) in gamma.components() {
        for b in 0..n {
            if adj[j][b].is_zero() {
                continue;
            }
            for c in 0..n {
                if adj[k][c].is_zero() {
                    continue;
                }
                let t = g.mul_poly(&(&adj[j][b] * &adj[k][c]));
                add_into(&mut lowered, (i, b, c), t);
            }
        }
    }
    let mut out: BTreeMap<(usize, usize, usize), RationalFunction> = BTreeMap::new();
    for (&(i, b, c), t) in &lowered {
        for (a, row) in jac.iter().enumerate() {
            if row[i].is_zero() {
                continue;
            }
            add_into(&mut out, (a, b, c), t.mul_poly(&row[i]));
        }
    }
    for (a, h) in hess.iter().enumerate() {
        for b in 0..n {
            for c in 0..n {
                let mut s = Polynomial::zero(x);
                for (i, hrow) in h.iter().enumerate() {
                    for (j, hij) in hrow.iter().enumerate() {
                        if hij.is_zero() {
                            continue;
                        }
                        s = &s + &(&(hij * &adj[i][b]) * &adj[j][c]);
                    }
                }
                if !s.is_zero() {
                    add_into(&mut out, (a, b, c), -RationalFunction::from_poly(s));
                }
            }
        }
    }
    let det2 = det.pow(2);
    let mut res = ChristoffelConnection::zero(x);
    for (k, v) in out {
        res.set(k, v.div_poly(&det2)?)?;
    }
    Ok(res)
}

/// Inverse of [`connection_transform`]: given `γ` on the target chart of
/// `f`, returns `Γ = f^*γ` on the source chart,
///
/// `Γ^d_{ef} = (J⁻¹)^d_i J^j_e J^k_f γ^i_{jk}∘f + (J⁻¹)^d_i H^i_{ef}`.
pub fn connection_pullback(gamma: &ChristoffelConnection, f: &PolyMap) -> Result<ChristoffelConnection> {
    if gamma.coords()[..] != f.target()[..] {
        return Err(Error::InvalidArgument("connection must live on the target chart".into()));
    }
    let x = f.source();
    let n = x.len();
    let (adj, det) = f.inverse_jacobian()?;
    let jac = f.jacobian();
    let hess = f.hessians();
    let moved = gamma.substitute(f.components(), x)?;

    let mut lowered: BTreeMap<(usize, usize, usize), RationalFunction> = BTreeMap::new();
    for (&(i, j, k), g) in moved.components() {
        for e in 0..n {
            if jac[j][e].is_zero() {
                continue;
            }
            for ff in 0..n {
                if jac[k][ff].is_zero() {
                    continue;
                }
                add_into(&mut lowered, (i, e, ff), g.mul_poly(&(&jac[j][e] * &jac[k][ff])));
            }
        }
    }
    for (i, h) in hess.iter().enumerate() {
        for e in 0..n {
            for ff in 0..n {
                if !h[e][ff].is_zero() {
                    add_into(&mut lowered, (i, e, ff), RationalFunction::from_poly(h[e][ff].clone()));
                }
            }
        }
    }
    let mut out: BTreeMap<(usize, usize, usize), RationalFunction> = BTreeMap::new();
    for (&(i, e, ff), t) in &lowered {
        for (d, row) in adj.iter().enumerate() {
            if row[i].is_zero() {
                continue;
            }
            add_into(&mut out, (d, e, ff), t.mul_poly(&row[i]));
        }
    }
    let mut res = ChristoffelConnection::zero(x);
    for (k, v) in out {
        res.set(k, v.div_poly(&det)?)?;
    }
    Ok(res)
}

fn add_into(
    map: &mut BTreeMap<(usize, usize, usize), RationalFunction>,
    k: (usize, usize, usize),
    v: RationalFunction,
) {
    match map.remove(&k) {
        Some(old) => {
            let s = &old + &v;
            if !s.is_zero() {
                map.insert(k, s);
            }
        }
        None => {
            if !v.is_zero() {
                map.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{vars, CyclotomicNumber as Cyc};

    #[test]
    fn flat_under_square_map() {
        let zv = vars(&["z"]);
        let f = PolyMap::monomial(zv.clone(), vars(&["y"]), &[2]).unwrap();
        let g = connection_transform(&ChristoffelConnection::zero(&zv), &f).unwrap();
        let z = Polynomial::var(&zv, "z").unwrap();
        let expect = RationalFunction::new(Polynomial::from_int(&zv, -1), z.pow(2).scale(&Cyc::from_int(2))).unwrap();
        assert_eq!(g.get(0, 0, 0), expect);
        assert_eq!(g.components().len(), 1);
    }

    #[test]
    fn flat_under_identity() {
        let zv = vars(&["z1", "z2"]);
        let f = PolyMap::identity(&zv);
        assert!(connection_transform(&ChristoffelConnection::zero(&zv), &f).unwrap().is_zero());
    }

    #[test]
    fn pullback_undoes_transform() {
        let zv = vars(&["z"]);
        let yv = vars(&["y"]);
        let f = PolyMap::monomial(zv.clone(), yv.clone(), &[3]).unwrap();
        let y = Polynomial::var(&yv, "y").unwrap();
        // γ = -(2/3)/y pulls back to the flat connection
        let gamma = ChristoffelConnection::from_components(
            &yv,
            [((0, 0, 0), RationalFunction::new(Polynomial::from_int(&yv, -2), y.scale(&Cyc::from_int(3))).unwrap())],
        )
        .unwrap();
        assert!(connection_pullback(&gamma, &f).unwrap().is_zero());
    }
}
