//! Connections near a reflection stratum `{y_n = 0}` of ramification `r`.
//!
//! In the slice chart `y_i = z_i` (`i < n`), `y_n = z_n^r` a holomorphic
//! invariant connection `Γ` and its image `γ` are related through
//! polynomials `Γ̃^a_{bc}` on the orbit chart. With `y = y_n`, `z = z_n`
//! and indices `i, j, k < n`:
//!
//! | component            | `γ` on the orbit chart   | `Γ` on the slice          |
//! |----------------------|--------------------------|---------------------------|
//! | `i; j, k`            | `Γ̃`                      | `Γ̃∘σ`                     |
//! | `n; j, k`            | `y Γ̃`                    | `(z/r) Γ̃∘σ`               |
//! | `i; j, n` / `i; n, k`| `Γ̃`                      | `r z^{r−1} Γ̃∘σ`           |
//! | `n; j, n` / `n; n, k`| `Γ̃`                      | `Γ̃∘σ`                     |
//! | `i; n, n`            | `Γ̃ / y`                  | `r² z^{r−2} Γ̃∘σ`          |
//! | `n; n, n`            | `Γ̃ − (r−1)/(r y)`        | `r z^{r−1} Γ̃∘σ`           |
//!
//! `γ` lifts exactly when every recovered `Γ̃` is a polynomial.

use std::fmt;

use crate::algebra::cyclotomic::CyclotomicNumber as Cyc;
use crate::algebra::{Monomial, Polynomial, RationalFunction, Vars};
use crate::error::{Error, Result};
use crate::group::default_coords;
use crate::tensor::ChristoffelConnection;

/// Orbit and slice charts around the stratum given by the last coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedConnectionPattern {
    r: u32,
    orbit_coords: Vars,
    slice_coords: Vars,
}

impl AdaptedConnectionPattern {
    pub fn new(r: u32, orbit_coords: Vars, slice_coords: Vars) -> Result<Self> {
        if r < 2 {
            return Err(Error::InvalidArgument(format!("ramification must be at least 2, got {r}")));
        }
        if orbit_coords.is_empty() || orbit_coords.len() != slice_coords.len() {
            return Err(Error::DimensionMismatch {
                expected: orbit_coords.len().max(1),
                found: slice_coords.len(),
            });
        }
        Ok(AdaptedConnectionPattern {
            r,
            orbit_coords,
            slice_coords,
        })
    }

    /// Orbit chart `y` / `y1 … yn`, slice chart `z` / `z1 … zn`.
    pub fn standard(r: u32, n: usize) -> Result<Self> {
        AdaptedConnectionPattern::new(r, default_coords("y", n), default_coords("z", n))
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn n(&self) -> usize {
        self.orbit_coords.len()
    }

    pub fn orbit_coords(&self) -> &Vars {
        &self.orbit_coords
    }

    pub fn slice_coords(&self) -> &Vars {
        &self.slice_coords
    }

    fn last(&self) -> usize {
        self.n() - 1
    }

    /// `σ` on the slice: `y_i ↦ z_i`, `y_n ↦ z_n^r`.
    fn sigma_images(&self) -> Vec<Polynomial> {
        let z = &self.slice_coords;
        (0..self.n())
            .map(|i| {
                let v = Polynomial::var_at(z, i);
                if i == self.last() {
                    v.pow(self.r)
                } else {
                    v
                }
            })
            .collect()
    }

    fn classify(&self, (a, b, c): (usize, usize, usize)) -> Shape {
        let n = self.last();
        match (a == n, b == n, c == n) {
            (false, false, false) => Shape::Tangential,
            (true, false, false) => Shape::NormalOfTangential,
            (false, true, true) => Shape::TangentialOfNormal,
            (true, true, true) => Shape::Normal,
            (false, _, _) => Shape::MixedTangential,
            (true, _, _) => Shape::MixedNormal,
        }
    }

    /// `r^{coeff_exp} z_n^{z_exp}` relating `Γ` to `Γ̃∘σ`.
    fn slice_factor(&self, shape: Shape) -> (i64, u32) {
        let r = self.r;
        match shape {
            Shape::Tangential | Shape::MixedNormal => (0, 0),
            Shape::NormalOfTangential => (-1, 1),
            Shape::MixedTangential | Shape::Normal => (1, r - 1),
            Shape::TangentialOfNormal => (2, r - 2),
        }
    }
}

/// Position of a component relative to the stratum coordinate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// `i; j, k`
    Tangential,
    /// `n; j, k`: must vanish on the stratum.
    NormalOfTangential,
    /// `i; j, n` or `i; n, k`
    MixedTangential,
    /// `n; j, n` or `n; n, k`
    MixedNormal,
    /// `i; n, n`: at most a simple pole.
    TangentialOfNormal,
    /// `n; n, n`: simple pole with residue `−(r−1)/r`.
    Normal,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Tangential | Shape::MixedTangential | Shape::MixedNormal => "holomorphic",
            Shape::NormalOfTangential => "divisible by the stratum coordinate",
            Shape::TangentialOfNormal => "at most a simple pole",
            Shape::Normal => "residue -(r-1)/r",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDiagnostic {
    pub index: (usize, usize, usize),
    pub shape: Shape,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConnectionCheck {
    pub liftable: bool,
    pub diagnostics: Vec<ComponentDiagnostic>,
}

impl ConnectionCheck {
    pub fn violations(&self) -> impl Iterator<Item = &ComponentDiagnostic> {
        self.diagnostics.iter().filter(|d| !d.ok)
    }
}

fn all_indices(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
}

/// `Γ̃` recovered from a component of `γ`.
fn recover(pattern: &AdaptedConnectionPattern, shape: Shape, g: &RationalFunction) -> Result<RationalFunction> {
    let y = &pattern.orbit_coords;
    let yn = Polynomial::var_at(y, pattern.last());
    let r = pattern.r as i64;
    Ok(match shape {
        Shape::Tangential | Shape::MixedTangential | Shape::MixedNormal => g.clone(),
        Shape::NormalOfTangential => g.div_poly(&yn)?,
        Shape::TangentialOfNormal => g.mul_poly(&yn),
        Shape::Normal => {
            let pole = RationalFunction::new(
                Polynomial::from_int(y, r - 1),
                yn.scale(&Cyc::from_int(r)),
            )?;
            g + &pole
        }
    })
}

/// Checks the component shapes; `γ` must live on the orbit chart.
pub fn check_liftable_connection(
    gamma: &ChristoffelConnection,
    pattern: &AdaptedConnectionPattern,
) -> Result<ConnectionCheck> {
    if gamma.coords()[..] != pattern.orbit_coords[..] {
        return Err(Error::InvalidArgument(format!(
            "connection lives on ({}) but the pattern expects ({})",
            gamma.coords().join(", "),
            pattern.orbit_coords.join(", ")
        )));
    }
    let mut diagnostics = Vec::new();
    for idx in all_indices(pattern.n()) {
        let shape = pattern.classify(idx);
        let tilde = recover(pattern, shape, &gamma.get(idx.0, idx.1, idx.2))?;
        diagnostics.push(ComponentDiagnostic {
            index: idx,
            shape,
            ok: tilde.is_polynomial(),
        });
    }
    Ok(ConnectionCheck {
        liftable: diagnostics.iter().all(|d| d.ok),
        diagnostics,
    })
}

/// Lifts `γ` to the invariant holomorphic connection on the slice chart.
pub fn lift_connection_slice(
    gamma: &ChristoffelConnection,
    pattern: &AdaptedConnectionPattern,
) -> Result<ChristoffelConnection> {
    if !check_liftable_connection(gamma, pattern)?.liftable {
        return Err(Error::PatternViolation);
    }
    let z = &pattern.slice_coords;
    let images = pattern.sigma_images();
    let mut out = ChristoffelConnection::zero(z);
    for idx in all_indices(pattern.n()) {
        let shape = pattern.classify(idx);
        let tilde = recover(pattern, shape, &gamma.get(idx.0, idx.1, idx.2))?
            .as_polynomial()
            .expect("checked");
        if tilde.is_zero() {
            continue;
        }
        let (ce, ze) = pattern.slice_factor(shape);
        let coeff = Cyc::from_int(pattern.r as i64).pow(ce)?;
        let mut e = vec![0u32; pattern.n()];
        e[pattern.last()] = ze;
        let v = tilde
            .compose_all(&images)
            .with_vars(z)?
            .mul_monomial(&Monomial::new(e), &coeff);
        out.set(idx, RationalFunction::from_poly(v))?;
    }
    Ok(out)
}

/// Image on the orbit chart of an invariant holomorphic connection given
/// on the slice chart.
pub fn pushforward_connection_slice(
    big_gamma: &ChristoffelConnection,
    pattern: &AdaptedConnectionPattern,
) -> Result<ChristoffelConnection> {
    if big_gamma.coords()[..] != pattern.slice_coords[..] {
        return Err(Error::InvalidArgument(format!(
            "connection lives on ({}) but the pattern expects ({})",
            big_gamma.coords().join(", "),
            pattern.slice_coords.join(", ")
        )));
    }
    let y = &pattern.orbit_coords;
    let z = &pattern.slice_coords;
    let last = pattern.last();
    let r = pattern.r;
    let mut out = ChristoffelConnection::zero(y);
    for idx in all_indices(pattern.n()) {
        let shape = pattern.classify(idx);
        let g = big_gamma.get(idx.0, idx.1, idx.2);
        let g = g.as_polynomial().ok_or_else(|| {
            Error::InvalidArgument(format!("component {idx:?} is not holomorphic"))
        })?;
        let (ce, ze) = pattern.slice_factor(shape);
        let mut e = vec![0u32; pattern.n()];
        e[last] = ze;
        let inv = Cyc::from_int(r as i64).pow(-ce)?;
        let scaled = g.with_vars(z)?.scale(&inv);
        let mut tilde = Polynomial::zero(y);
        for (m, c) in scaled.terms() {
            let en = m.exponent(last);
            if en < ze || (en - ze) % r != 0 {
                return Err(Error::NotInvariant);
            }
            let mut exps: Vec<u32> = (0..pattern.n()).map(|k| m.exponent(k)).collect();
            exps[last] = (en - ze) / r;
            tilde = &tilde + &Polynomial::monomial(y, Monomial::new(exps), c.clone());
        }
        let tilde = RationalFunction::from_poly(tilde);
        let yn = Polynomial::var_at(y, last);
        let gamma = match shape {
            Shape::Tangential | Shape::MixedTangential | Shape::MixedNormal => tilde,
            Shape::NormalOfTangential => tilde.mul_poly(&yn),
            Shape::TangentialOfNormal => tilde.div_poly(&yn)?,
            Shape::Normal => {
                let pole = RationalFunction::new(
                    Polynomial::from_int(y, r as i64 - 1),
                    yn.scale(&Cyc::from_int(r as i64)),
                )?;
                &tilde - &pole
            }
        };
        out.set(idx, gamma)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_image(pattern: &AdaptedConnectionPattern) -> ChristoffelConnection {
        pushforward_connection_slice(&ChristoffelConnection::zero(pattern.slice_coords()), pattern).unwrap()
    }

    #[test]
    fn flat_connection_round_trip() {
        for n in 1..=3 {
            for r in 2..=4 {
                let pat = AdaptedConnectionPattern::standard(r, n).unwrap();
                let g = flat_image(&pat);
                assert_eq!(g.components().len(), 1);
                assert!(check_liftable_connection(&g, &pat).unwrap().liftable);
                assert!(lift_connection_slice(&g, &pat).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn orbit_flat_connection_does_not_lift() {
        let pat = AdaptedConnectionPattern::standard(2, 2).unwrap();
        let check = check_liftable_connection(&ChristoffelConnection::zero(pat.orbit_coords()), &pat).unwrap();
        assert!(!check.liftable);
        let bad: Vec<_> = check.violations().map(|d| d.index).collect();
        assert_eq!(bad, vec![(1, 1, 1)]);
    }

    #[test]
    fn constant_normal_component_violates() {
        let pat = AdaptedConnectionPattern::standard(3, 2).unwrap();
        let mut g = flat_image(&pat);
        g.set((1, 0, 0), RationalFunction::one(pat.orbit_coords())).unwrap();
        assert!(!check_liftable_connection(&g, &pat).unwrap().liftable);
        assert_eq!(lift_connection_slice(&g, &pat).unwrap_err(), Error::PatternViolation);
    }

    #[test]
    fn constant_tilde_components() {
        let pat = AdaptedConnectionPattern::standard(2, 2).unwrap();
        let y = pat.orbit_coords().clone();
        let yn = Polynomial::var(&y, "y2").unwrap();
        let one = RationalFunction::one(&y);
        // every Γ̃ = 1
        let mut g = ChristoffelConnection::zero(&y);
        for idx in all_indices(2) {
            let v = match pat.classify(idx) {
                Shape::NormalOfTangential => one.mul_poly(&yn),
                Shape::TangentialOfNormal => one.div_poly(&yn).unwrap(),
                Shape::Normal => &one - &RationalFunction::new(Polynomial::one(&y), yn.scale(&Cyc::from_int(2))).unwrap(),
                _ => one.clone(),
            };
            g.set(idx, v).unwrap();
        }
        let lifted = lift_connection_slice(&g, &pat).unwrap();
        let z2 = Polynomial::var(pat.slice_coords(), "z2").unwrap();
        assert_eq!(lifted.get(1, 0, 0), RationalFunction::from_poly(z2.scale(&Cyc::from_ratio(1, 2))));
        assert_eq!(pushforward_connection_slice(&lifted, &pat).unwrap(), g);
    }

    #[test]
    fn non_invariant_rejected() {
        let pat = AdaptedConnectionPattern::standard(2, 1).unwrap();
        let z = pat.slice_coords().clone();
        let g = ChristoffelConnection::from_components(&z, [((0, 0, 0), RationalFunction::one(&z))]).unwrap();
        assert_eq!(pushforward_connection_slice(&g, &pat).unwrap_err(), Error::NotInvariant);
    }
}
