use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::cyclotomic::CyclotomicNumber as Cyc;
use crate::algebra::{Polynomial, RationalFunction, Vars};
use crate::error::{Error, Result};
use crate::group::{FiniteMatrixGroup, GroupElement};

use super::map::PolyMap;

/// Multi-index into the components: contravariant slots first.
pub type Index = Vec<usize>;

/// A type-(p, q) tensor field with rational-function components.
#[derive(Clone, Debug)]
pub struct TensorField {
    p: usize,
    q: usize,
    coords: Vars,
    components: BTreeMap<Index, RationalFunction>,
}

impl TensorField {
    pub fn zero(p: usize, q: usize, coords: &Vars) -> Self {
        TensorField {
            p,
            q,
            coords: coords.clone(),
            components: BTreeMap::new(),
        }
    }

    pub fn scalar(coords: &Vars, f: RationalFunction) -> Result<Self> {
        TensorField::from_components(0, 0, coords, [(vec![], f)])
    }

    pub fn from_components(
        p: usize,
        q: usize,
        coords: &Vars,
        components: impl IntoIterator<Item = (Index, RationalFunction)>,
    ) -> Result<Self> {
        let n = coords.len();
        let mut t = TensorField::zero(p, q, coords);
        for (idx, f) in components {
            if idx.len() != p + q {
                return Err(Error::DimensionMismatch {
                    expected: p + q,
                    found: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: bad + 1,
                });
            }
            let f = f.with_vars(coords)?;
            t.accumulate(idx, f);
        }
        Ok(t)
    }

    /// `∂/∂name`.
    pub fn vector(coords: &Vars, name: &str) -> Result<Self> {
        let i = position(coords, name)?;
        TensorField::from_components(1, 0, coords, [(vec![i], RationalFunction::one(coords))])
    }

    /// `d(name)`.
    pub fn covector(coords: &Vars, name: &str) -> Result<Self> {
        let i = position(coords, name)?;
        TensorField::from_components(0, 1, coords, [(vec![i], RationalFunction::one(coords))])
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn coords(&self) -> &Vars {
        &self.coords
    }

    pub fn dimension(&self) -> usize {
        self.coords.len()
    }

    /// Nonzero components only.
    pub fn components(&self) -> &BTreeMap<Index, RationalFunction> {
        &self.components
    }

    pub fn component(&self, idx: &[usize]) -> RationalFunction {
        self.components
            .get(idx)
            .cloned()
            .unwrap_or_else(|| RationalFunction::zero(&self.coords))
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    fn accumulate(&mut self, idx: Index, f: RationalFunction) {
        if f.is_zero() {
            return;
        }
        match self.components.remove(&idx) {
            Some(old) => {
                let s = &old + &f;
                if !s.is_zero() {
                    self.components.insert(idx, s);
                }
            }
            None => {
                self.components.insert(idx, f);
            }
        }
    }

    fn check_same_shape(&self, other: &TensorField) -> Result<()> {
        if self.coords[..] != other.coords[..] {
            return Err(Error::InvalidArgument(format!(
                "coordinate mismatch: ({}) vs ({})",
                self.coords.join(", "),
                other.coords.join(", ")
            )));
        }
        if (self.p, self.q) != (other.p, other.q) {
            return Err(Error::InvalidArgument(format!(
                "type mismatch: ({}, {}) vs ({}, {})",
                self.p, self.q, other.p, other.q
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &TensorField) -> Result<TensorField> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (idx, f) in &other.components {
            out.accumulate(idx.clone(), f.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TensorField) -> Result<TensorField> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> TensorField {
        self.map_components(|f| -f)
    }

    pub fn scale(&self, c: &Cyc) -> TensorField {
        self.map_components(|f| f.scale(c))
    }

    pub fn mul_function(&self, f: &RationalFunction) -> Result<TensorField> {
        let f = f.with_vars(&self.coords)?;
        Ok(self.map_components(|g| &f * g))
    }

    pub fn map_components(&self, mut op: impl FnMut(&RationalFunction) -> RationalFunction) -> TensorField {
        TensorField {
            p: self.p,
            q: self.q,
            coords: self.coords.clone(),
            components: self
                .components
                .iter()
                .map(|(k, f)| (k.clone(), op(f)))
                .filter(|(_, f)| !f.is_zero())
                .collect(),
        }
    }

    /// `self ⊗ other`; contravariant slots of `self` precede those of
    /// `other`, and likewise for covariant slots.
    pub fn tensor_product(&self, other: &TensorField) -> Result<TensorField> {
        if self.coords[..] != other.coords[..] {
            return Err(Error::InvalidArgument("coordinate mismatch in tensor product".into()));
        }
        let mut out = TensorField::zero(self.p + other.p, self.q + other.q, &self.coords);
        for (a, f) in &self.components {
            for (b, g) in &other.components {
                let mut idx = Vec::with_capacity(a.len() + b.len());
                idx.extend_from_slice(&a[..self.p]);
                idx.extend_from_slice(&b[..other.p]);
                idx.extend_from_slice(&a[self.p..]);
                idx.extend_from_slice(&b[other.p..]);
                out.accumulate(idx, f * g);
            }
        }
        Ok(out)
    }

    /// `Σ_π sign(π) T(v_π(1), …, v_π(q))` over the covariant slots.
    pub fn alternate(&self) -> Result<TensorField> {
        if self.p != 0 {
            return Err(Error::InvalidArgument("alternation needs a covariant tensor".into()));
        }
        let mut out = TensorField::zero(0, self.q, &self.coords);
        for (perm, sign) in permutations(self.q) {
            for (j, f) in &self.components {
                let mut i = vec![0; self.q];
                for (k, &pk) in perm.iter().enumerate() {
                    i[pk] = j[k];
                }
                out.accumulate(i, if sign { -f.clone() } else { f.clone() });
            }
        }
        Ok(out)
    }

    /// Exterior product of skew covariant tensors, normalized so that
    /// `dx ∧ dy = dx ⊗ dy − dy ⊗ dx`.
    pub fn wedge(&self, other: &TensorField) -> Result<TensorField> {
        if self.p != 0 || other.p != 0 {
            return Err(Error::InvalidArgument("wedge needs covariant tensors".into()));
        }
        let alt = self.tensor_product(other)?.alternate()?;
        let norm = factorial(self.q) * factorial(other.q);
        Ok(alt.scale(&Cyc::from_ratio(1, norm as i64)))
    }

    /// True when every transposition of covariant slots negates the tensor.
    pub fn is_skew(&self) -> bool {
        if self.q < 2 {
            return true;
        }
        for s in self.p..self.p + self.q - 1 {
            let mut swapped = TensorField::zero(self.p, self.q, &self.coords);
            for (idx, f) in &self.components {
                let mut j = idx.clone();
                j.swap(s, s + 1);
                swapped.accumulate(j, -f.clone());
            }
            if swapped != *self {
                return false;
            }
        }
        true
    }

    /// Renames the coordinates positionally.
    pub fn with_coords(&self, coords: &Vars) -> Result<TensorField> {
        if coords.len() != self.coords.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coords.len(),
                found: coords.len(),
            });
        }
        let images: Vec<Polynomial> = (0..coords.len()).map(|i| Polynomial::var_at(coords, i)).collect();
        self.substitute(&images, coords)
    }

    /// Re-expresses the field over a reordering of its coordinate names.
    pub fn permute_coords(&self, target: &Vars) -> Result<TensorField> {
        let n = self.dimension();
        if target.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: target.len(),
            });
        }
        let map: Vec<usize> = self
            .coords
            .iter()
            .map(|c| position(target, c))
            .collect::<Result<_>>()?;
        let mut out = TensorField::zero(self.p, self.q, target);
        for (idx, f) in &self.components {
            out.accumulate(idx.iter().map(|&i| map[i]).collect(), f.with_vars(target)?);
        }
        Ok(out)
    }

    /// Composes every component with `images` (one polynomial in `coords`
    /// per current coordinate) without touching the slots.
    pub fn substitute(&self, images: &[Polynomial], coords: &Vars) -> Result<TensorField> {
        let mut out = TensorField::zero(self.p, self.q, coords);
        for (idx, f) in &self.components {
            out.accumulate(idx.clone(), f.compose_all(images)?.with_vars(coords)?);
        }
        Ok(out)
    }

    /// Applies a linear transformation slot by slot. For a contravariant
    /// slot `upper(new, old)` is the coefficient, for a covariant slot
    /// `lower(old, new)`.
    pub(crate) fn transform_slots(
        &self,
        upper: impl Fn(usize, usize) -> Polynomial,
        lower: impl Fn(usize, usize) -> Polynomial,
    ) -> TensorField {
        let n = self.dimension();
        let mut cur = self.clone();
        for s in 0..self.p + self.q {
            let mut next = TensorField::zero(self.p, self.q, &self.coords);
            for (idx, f) in &cur.components {
                let old = idx[s];
                for new in 0..n {
                    let c = if s < self.p { upper(new, old) } else { lower(old, new) };
                    if c.is_zero() {
                        continue;
                    }
                    let mut j = idx.clone();
                    j[s] = new;
                    next.accumulate(j, f.mul_poly(&c));
                }
            }
            cur = next;
        }
        cur
    }

    /// Pushforward `g_* T`: components become `g · T(g⁻¹ x)`, so the
    /// contravariant slots see `g` and the covariant slots `g⁻¹`.
    pub fn act(&self, g: &GroupElement) -> Result<TensorField> {
        let n = self.dimension();
        if g.dimension() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: g.dimension(),
            });
        }
        let ginv = g.inverse();
        let images = ginv.matrix().linear_forms(&self.coords);
        let moved = self.substitute(&images, &self.coords)?;
        let m = g.matrix();
        let mi = ginv.matrix();
        let coords = &self.coords;
        Ok(moved.transform_slots(
            |a, i| Polynomial::constant(coords, m.get(a, i).clone()),
            |j, b| Polynomial::constant(coords, mi.get(j, b).clone()),
        ))
    }

    /// `g_* T = T` for every generator.
    pub fn is_invariant(&self, group: &FiniteMatrixGroup) -> Result<bool> {
        for g in group.generators() {
            if self.act(g)? != *self {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `f^* T` for a tensor on the target chart of `f`; covariant slots
    /// use `J`, contravariant slots `J⁻¹ = adj J / det J`.
    pub fn pullback(&self, f: &PolyMap) -> Result<TensorField> {
        if self.coords[..] != f.target()[..] {
            return Err(Error::InvalidArgument(format!(
                "tensor lives on ({}) but the map lands in ({})",
                self.coords.join(", "),
                f.target().join(", ")
            )));
        }
        let (adj, det) = f.inverse_jacobian()?;
        let jac = f.jacobian();
        let moved = self.substitute(f.components(), f.source())?;
        let out = moved.transform_slots(|i, a| adj[i][a].clone(), |a, j| jac[a][j].clone());
        if self.p == 0 {
            return Ok(out);
        }
        let den = det.pow(self.p as u32);
        let mut res = TensorField::zero(self.p, self.q, f.source());
        for (idx, c) in out.components {
            res.accumulate(idx, c.div_poly(&den)?);
        }
        Ok(res)
    }

    /// Every component reduces to a polynomial.
    pub fn is_holomorphic(&self) -> bool {
        self.components.values().all(RationalFunction::is_polynomial)
    }

    /// Cancels tracked factors in every component.
    pub fn cancel(&self, factors: &[Polynomial]) -> TensorField {
        self.map_components(|f| f.cancel(factors))
    }

    fn slot_names(&self, idx: &[usize]) -> String {
        let mut parts = Vec::with_capacity(idx.len());
        for (s, &i) in idx.iter().enumerate() {
            let name = &self.coords[i];
            parts.push(if s < self.p {
                format!("ddy({name})")
            } else {
                format!("d({name})")
            });
        }
        parts.join(" (x) ")
    }
}

fn position(coords: &Vars, name: &str) -> Result<usize> {
    coords
        .iter()
        .position(|c| c == name)
        .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// All permutations of `0..k` with their parity (`true` = odd).
pub(crate) fn permutations(k: usize) -> Vec<(Vec<usize>, bool)> {
    fn go(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut perms = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inv = (0..k)
                .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            (p, inv % 2 == 1)
        })
        .collect()
}

impl PartialEq for TensorField {
    fn eq(&self, other: &Self) -> bool {
        if self.p != other.p || self.q != other.q || self.coords[..] != other.coords[..] {
            return false;
        }
        let keys: std::collections::BTreeSet<&Index> =
            self.components.keys().chain(other.components.keys()).collect();
        keys.into_iter()
            .all(|k| self.component(k) == other.component(k))
    }
}

impl Eq for TensorField {}

impl fmt::Display for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.components.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, c) in &self.components {
            let basis = self.slot_names(idx);
            let (neg, coef) = coefficient_text(c);
            let term = match (coef.as_str(), basis.is_empty()) {
                ("1", true) => "1".to_string(),
                (_, true) => coef,
                ("1", false) => basis,
                (_, false) => format!("{coef}*{basis}"),
            };
            match (first, neg) {
                (true, true) => write!(f, "-{term}")?,
                (true, false) => write!(f, "{term}")?,
                (false, true) => write!(f, " - {term}")?,
                (false, false) => write!(f, " + {term}")?,
            }
            first = false;
        }
        Ok(())
    }
}

/// Splits off a leading sign when the coefficient is a single polynomial
/// term; anything else is parenthesized.
fn coefficient_text(c: &RationalFunction) -> (bool, String) {
    if let Some(p) = c.as_polynomial() {
        if p.num_terms() == 1 {
            let s = p.to_string();
            return match s.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, s),
            };
        }
        return (false, format!("({p})"));
    }
    (false, format!("({c})"))
}
