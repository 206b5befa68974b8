//! Lifting tensor fields from the orbit space to `V`.
//!
//! Two independent routes decide whether a meromorphic tensor field `T`
//! on an orbit chart extends to a holomorphic invariant field upstairs:
//!
//! * the residuum route ([`decide_lift_adapted`]) reads off the order `m`
//!   of each component along each stratum `{y_k = 0}` and requires
//!   `μ = m·r + (q′ − p′)(r − 1) ≥ 0`;
//! * the pullback route ([`lift_via_pullback`]) pulls `T` back along the
//!   orbit map and tests the result for polynomiality.
//!
//! [`cross_validate`] and [`thm37_sweep`] compare the two.

use std::fmt;
use std::ops::RangeInclusive;

use crate::algebra::cyclotomic::CyclotomicNumber as Cyc;
use crate::algebra::{vars, Monomial, Order, Polynomial, RationalFunction, Vars};
use crate::error::{Error, Result};
use crate::group::{close, cyclic, default_coords, FiniteMatrixGroup, GroupElement, DEFAULT_CAP};
use crate::invariants::{express_in_generators, OrbitMap};
use crate::tensor::{Divisor, Index, PolyMap, TensorField};

/// A codimension-one stratum `{y_k = 0}` of an adapted orbit chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumModel {
    /// Orbit-chart coordinate vanishing on the stratum.
    pub stratum_coord: String,
    /// Slice coordinate with `stratum_coord = slice_coord^r`.
    pub slice_coord: String,
    pub ramification: u32,
    pub label_equation: Polynomial,
}

impl StratumModel {
    pub fn new(orbit_coords: &Vars, stratum_coord: &str, slice_coord: &str, ramification: u32) -> Result<Self> {
        if ramification < 2 {
            return Err(Error::InvalidArgument(format!(
                "ramification must be at least 2, got {ramification}"
            )));
        }
        Ok(StratumModel {
            stratum_coord: stratum_coord.to_string(),
            slice_coord: slice_coord.to_string(),
            ramification,
            label_equation: Polynomial::var(orbit_coords, stratum_coord)?,
        })
    }
}

impl fmt::Display for StratumModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{} = 0}} (r = {})", self.stratum_coord, self.ramification)
    }
}

/// Orbit chart `y_k = z_k^{r_k}` of a diagonal reflection group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdaptedChart {
    orbit_coords: Vars,
    slice_coords: Vars,
    ramifications: Vec<u32>,
    strata: Vec<StratumModel>,
}

impl AdaptedChart {
    /// `ramifications[k] = 1` means the k-th coordinate carries no stratum.
    pub fn new(orbit_coords: Vars, slice_coords: Vars, ramifications: &[u32]) -> Result<Self> {
        let n = orbit_coords.len();
        if slice_coords.len() != n || ramifications.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: slice_coords.len().max(ramifications.len()),
            });
        }
        if ramifications.contains(&0) {
            return Err(Error::InvalidArgument("ramification must be positive".into()));
        }
        let strata = (0..n)
            .filter(|&k| ramifications[k] >= 2)
            .map(|k| StratumModel::new(&orbit_coords, &orbit_coords[k], &slice_coords[k], ramifications[k]))
            .collect::<Result<Vec<_>>>()?;
        Ok(AdaptedChart {
            orbit_coords,
            slice_coords,
            ramifications: ramifications.to_vec(),
            strata,
        })
    }

    /// Chart built from the reflection hyperplanes `{z_k = 0}` of a
    /// diagonal group. Orbit coordinates are named like the orbit map's.
    pub fn for_diagonal_group(group: &FiniteMatrixGroup) -> Result<Self> {
        if !group.is_diagonal() {
            return Err(Error::NonDiagonal);
        }
        let n = group.dimension();
        let mut ram = vec![1u32; n];
        for h in group.hyperplanes()? {
            let k = (0..n)
                .find(|&k| !h.linear_form.coeff(&Monomial::var(k, 1)).is_zero())
                .expect("nonzero linear form");
            ram[k] = h.label;
        }
        AdaptedChart::new(default_coords("y", n), group.coords().clone(), &ram)
    }

    /// Chart read off an orbit map whose components are pure powers
    /// `z_k^{r_k}`, one per source coordinate.
    pub fn from_orbit_map(sigma: &OrbitMap) -> Result<Self> {
        let n = sigma.source_vars().len();
        if !sigma.is_square() {
            return Err(Error::NonSquareOrbitMap {
                components: sigma.target_vars().len(),
                variables: n,
            });
        }
        let mut slice = vec![String::new(); n];
        let mut ram = vec![0u32; n];
        for (a, c) in sigma.components().iter().enumerate() {
            let (m, coeff) = match (c.num_terms(), c.leading_term()) {
                (1, Some(t)) => t,
                _ => return Err(Error::NonDiagonal),
            };
            let support: Vec<usize> = (0..n).filter(|&k| m.exponent(k) > 0).collect();
            if support.len() != 1 || !coeff.is_one() {
                return Err(Error::NonDiagonal);
            }
            let k = support[0];
            slice[a] = sigma.source_vars()[k].clone();
            ram[a] = m.exponent(k);
        }
        AdaptedChart::new(sigma.target_vars().clone(), vars(&slice), &ram)
    }

    pub fn orbit_coords(&self) -> &Vars {
        &self.orbit_coords
    }

    pub fn slice_coords(&self) -> &Vars {
        &self.slice_coords
    }

    pub fn ramifications(&self) -> &[u32] {
        &self.ramifications
    }

    pub fn strata(&self) -> &[StratumModel] {
        &self.strata
    }

    /// The slice-to-orbit map `z ↦ (z_k^{r_k})`.
    pub fn chart_map(&self) -> PolyMap {
        PolyMap::monomial(self.slice_coords.clone(), self.orbit_coords.clone(), &self.ramifications)
            .expect("matching dimensions")
    }

    /// `Z_{r_1} × … × Z_{r_n}` acting diagonally on the slice coordinates.
    pub fn reflection_group(&self) -> Result<FiniteMatrixGroup> {
        let n = self.slice_coords.len();
        let mut gens = Vec::new();
        for (k, &r) in self.ramifications.iter().enumerate() {
            if r >= 2 {
                let mut d = vec![Cyc::one(); n];
                d[k] = Cyc::zeta(r);
                gens.push(GroupElement::diagonal(d));
            }
        }
        if gens.is_empty() {
            gens.push(GroupElement::identity(n));
        }
        close(gens, DEFAULT_CAP)?.with_coords(self.slice_coords.clone())
    }
}

/// `Σ_H e_H · H` on `V`.
pub fn reflection_divisor(group: &FiniteMatrixGroup) -> Result<Divisor> {
    let mut d = Divisor::new();
    for h in group.hyperplanes()? {
        d.push(h.linear_form, Order::Finite(h.label as i64))?;
    }
    Ok(d)
}

/// Orbit-space strata of a diagonal group.
pub fn orbit_strata(group: &FiniteMatrixGroup) -> Result<Vec<StratumModel>> {
    Ok(AdaptedChart::for_diagonal_group(group)?.strata)
}

/// Residuum data of a single nonzero component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummandResiduum {
    pub index: Index,
    pub m: i64,
    pub p_prime: usize,
    pub q_prime: usize,
    pub mu: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResiduumReport {
    pub stratum: StratumModel,
    pub per_summand: Vec<SummandResiduum>,
    pub mu_s: Order,
    /// `(s, t)` with `p − q = r·s + t`, `0 ≤ t < r`; one-dimensional charts only.
    pub s_t: Option<(i64, i64)>,
}

/// `μ = m·r + (q′ − p′)(r − 1)` for every component, and its minimum.
pub fn residuum(t: &TensorField, stratum: &StratumModel) -> Result<ResiduumReport> {
    let k = t
        .coords()
        .iter()
        .position(|c| *c == stratum.stratum_coord)
        .ok_or_else(|| Error::UnknownCoordinate(stratum.stratum_coord.clone()))?;
    let h = Polynomial::var_at(t.coords(), k);
    let r = stratum.ramification as i64;
    let mut per_summand = Vec::with_capacity(t.components().len());
    let mut mu_s = Order::Infinite;
    for (idx, f) in t.components() {
        let m = f
            .order_along(&h)?
            .finite()
            .ok_or_else(|| Error::Internal("nonzero component of infinite order".into()))?;
        let p_prime = idx[..t.p()].iter().filter(|&&i| i == k).count();
        let q_prime = idx[t.p()..].iter().filter(|&&i| i == k).count();
        let mu = m * r + (q_prime as i64 - p_prime as i64) * (r - 1);
        mu_s = mu_s.min(Order::Finite(mu));
        per_summand.push(SummandResiduum {
            index: idx.clone(),
            m,
            p_prime,
            q_prime,
            mu,
        });
    }
    let s_t = (t.dimension() == 1).then(|| {
        let d = t.p() as i64 - t.q() as i64;
        (d.div_euclid(r), d.rem_euclid(r))
    });
    Ok(ResiduumReport {
        stratum: stratum.clone(),
        per_summand,
        mu_s,
        s_t,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Lifts,
    Fails,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Lifts => "lifts",
            Verdict::Fails => "fails",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftFailure {
    /// Negative residuum along a reflection stratum.
    Stratum { stratum: StratumModel, mu_s: i64 },
    /// Pole along a declared hypersurface away from the strata.
    OffStrata { hypersurface: Polynomial, order: i64 },
    /// Non-polynomial component of the pulled-back field.
    Pole { index: Index },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftCertificate {
    pub verdict: Verdict,
    pub lifted: Option<TensorField>,
    pub failure: Option<LiftFailure>,
    pub residua: Vec<ResiduumReport>,
}

impl LiftCertificate {
    pub fn lifts(&self) -> bool {
        self.verdict == Verdict::Lifts
    }

    fn fails(failure: LiftFailure, residua: Vec<ResiduumReport>) -> Self {
        LiftCertificate {
            verdict: Verdict::Fails,
            lifted: None,
            failure: Some(failure),
            residua,
        }
    }
}

/// Residuum decision in an adapted chart. `off_strata` lists the other
/// irreducible hypersurfaces allowed in denominators.
pub fn decide_lift_adapted(
    t: &TensorField,
    chart: &AdaptedChart,
    off_strata: &[Polynomial],
) -> Result<LiftCertificate> {
    if t.coords()[..] != chart.orbit_coords[..] {
        return Err(Error::InvalidArgument(format!(
            "tensor lives on ({}) but the chart has coordinates ({})",
            t.coords().join(", "),
            chart.orbit_coords.join(", ")
        )));
    }
    let off: Vec<Polynomial> = off_strata
        .iter()
        .map(|h| h.with_vars(t.coords()))
        .collect::<Result<_>>()?;
    let tracked: Vec<Polynomial> = chart
        .strata
        .iter()
        .map(|s| s.label_equation.clone())
        .chain(off.iter().cloned())
        .collect();
    for f in t.components().values() {
        let mut d = f.den().clone();
        for h in &tracked {
            while let Some(q) = d.exact_divide(h)? {
                d = q;
            }
        }
        if d.as_constant().is_none() {
            return Err(Error::CannotCertify(format!(
                "cannot certify off-strata holomorphy: denominator factor {d} is not tracked"
            )));
        }
    }

    let residua = chart
        .strata
        .iter()
        .map(|s| residuum(t, s))
        .collect::<Result<Vec<_>>>()?;
    for rep in &residua {
        if let Order::Finite(mu) = rep.mu_s {
            if mu < 0 {
                return Ok(LiftCertificate::fails(
                    LiftFailure::Stratum {
                        stratum: rep.stratum.clone(),
                        mu_s: mu,
                    },
                    residua,
                ));
            }
        }
    }
    for h in &off {
        for f in t.components().values() {
            if let Order::Finite(o) = f.order_along(h)? {
                if o < 0 {
                    return Ok(LiftCertificate::fails(
                        LiftFailure::OffStrata {
                            hypersurface: h.clone(),
                            order: o,
                        },
                        residua,
                    ));
                }
            }
        }
    }

    let lifted = substitute_into_slice(t, chart)?;
    if !lifted.is_holomorphic() {
        return Err(Error::Internal(format!(
            "residuum criterion passed but the slice field {lifted} has a pole"
        )));
    }
    if !lifted.is_invariant(&chart.reflection_group()?)? {
        return Err(Error::Internal("lifted field is not invariant".into()));
    }
    Ok(LiftCertificate {
        verdict: Verdict::Lifts,
        lifted: Some(polynomial_components(&lifted)),
        failure: None,
        residua,
    })
}

/// Slot-by-slot substitution `y_k ↦ z_k^{r_k}`: each covariant slot `k`
/// contributes `r_k z_k^{r_k − 1}`, each contravariant slot its inverse.
fn substitute_into_slice(t: &TensorField, chart: &AdaptedChart) -> Result<TensorField> {
    let z = &chart.slice_coords;
    let n = z.len();
    let images: Vec<Polynomial> = (0..n)
        .map(|k| Polynomial::var_at(z, k).pow(chart.ramifications[k]))
        .collect();
    let mut out = Vec::with_capacity(t.components().len());
    for (idx, f) in t.components() {
        let mut weight = vec![0i64; n];
        for (s, &i) in idx.iter().enumerate() {
            weight[i] += if s < t.p() { -1 } else { 1 };
        }
        let mut num_exp = vec![0u32; n];
        let mut den_exp = vec![0u32; n];
        let mut coeff = Cyc::one();
        for k in 0..n {
            let r = chart.ramifications[k] as i64;
            let e = weight[k] * (r - 1);
            if e >= 0 {
                num_exp[k] = e as u32;
            } else {
                den_exp[k] = (-e) as u32;
            }
            coeff = &coeff * &Cyc::from_int(r).pow(weight[k])?;
        }
        let factor = RationalFunction::new(
            Polynomial::monomial(z, Monomial::new(num_exp), coeff),
            Polynomial::monomial(z, Monomial::new(den_exp), Cyc::one()),
        )?;
        out.push((idx.clone(), &f.compose_all(&images)?.with_vars(z)? * &factor));
    }
    TensorField::from_components(t.p(), t.q(), z, out)
}

fn polynomial_components(t: &TensorField) -> TensorField {
    t.map_components(|f| match f.as_polynomial() {
        Some(p) => RationalFunction::from_poly(p),
        None => f.clone(),
    })
}

/// Closed-form one-dimensional rule: `T = y^m g(y) (∂/∂y)^{⊗p} ⊗ (dy)^{⊗q}`
/// lifts under `Z_r` iff `m ≥ p − q − s` where `p − q = r·s + t`; the lift
/// is `r^{q−p} z^{rm + (r−1)(q−p)} g(z^r) (∂/∂z)^{⊗p} ⊗ (dz)^{⊗q}`.
pub fn lift_cyclic_1d(g: &Polynomial, m: i64, p: usize, q: usize, r: u32) -> Result<Option<TensorField>> {
    if r < 2 {
        return Err(Error::InvalidArgument(format!("ramification must be at least 2, got {r}")));
    }
    let yv = vars(&["y"]);
    let g = g.with_vars(&yv)?;
    if g.coeff(&Monomial::one()).is_zero() {
        return Err(Error::InvalidArgument("the series must not vanish at 0".into()));
    }
    let ri = r as i64;
    let d = p as i64 - q as i64;
    let s = d.div_euclid(ri);
    if m < d - s {
        return Ok(None);
    }
    let zv = vars(&["z"]);
    let z = Polynomial::var(&zv, "z")?;
    let exp = ri * m - (ri - 1) * d;
    debug_assert!(exp >= 0);
    let coeff = Cyc::from_int(ri).pow(-d)?;
    let f = g
        .compose_all(&[z.pow(r)])
        .with_vars(&zv)?
        .mul_monomial(&Monomial::new(vec![exp as u32]), &coeff);
    Ok(Some(TensorField::from_components(
        p,
        q,
        &zv,
        [(vec![0; p + q], RationalFunction::from_poly(f))],
    )?))
}

/// Pullback route: `P = σ^* T` lifts iff it is polynomial.
pub fn lift_via_pullback(t: &TensorField, sigma: &OrbitMap, group: &FiniteMatrixGroup) -> Result<LiftCertificate> {
    let map = sigma.to_map()?;
    if !map.is_square() {
        return Err(Error::NonSquareOrbitMap {
            components: map.target().len(),
            variables: map.source().len(),
        });
    }
    let p = t.pullback(&map)?;
    if !p.is_invariant(group)? {
        return Err(Error::Internal("pullback along the orbit map is not invariant".into()));
    }
    if let Some((idx, _)) = p.components().iter().find(|(_, f)| !f.is_polynomial()) {
        return Ok(LiftCertificate::fails(LiftFailure::Pole { index: idx.clone() }, Vec::new()));
    }
    Ok(LiftCertificate {
        verdict: Verdict::Lifts,
        lifted: Some(polynomial_components(&p)),
        failure: None,
        residua: Vec::new(),
    })
}

/// Both routes agree on `T`.
pub fn cross_validate(
    t: &TensorField,
    sigma: &OrbitMap,
    group: &FiniteMatrixGroup,
    chart: &AdaptedChart,
) -> Result<bool> {
    let a = decide_lift_adapted(t, chart, &[])?;
    let b = lift_via_pullback(t, sigma, group)?;
    Ok(a.verdict == b.verdict && same_lift(&a, &b, sigma.source_vars())?)
}

fn same_lift(a: &LiftCertificate, b: &LiftCertificate, coords: &Vars) -> Result<bool> {
    Ok(match (&a.lifted, &b.lifted) {
        (Some(x), Some(y)) => x.permute_coords(coords)? == *y,
        (None, None) => true,
        _ => false,
    })
}

/// `y^m g(y) (∂/∂y)^{⊗p} ⊗ (dy)^{⊗q}` on the chart with coordinate `y`.
pub fn cyclic_test_tensor(g: &Polynomial, m: i64, p: usize, q: usize) -> Result<TensorField> {
    let yv = vars(&["y"]);
    let g = g.with_vars(&yv)?;
    let y = Polynomial::var(&yv, "y")?;
    let f = if m >= 0 {
        RationalFunction::from_poly(&g * &y.pow(m as u32))
    } else {
        RationalFunction::new(g, y.pow((-m) as u32))?
    };
    TensorField::from_components(p, q, &yv, [(vec![0; p + q], f)])
}

/// The series `1`, `1 + y`, `2 + y²`.
pub fn default_series() -> Vec<Polynomial> {
    let yv = vars(&["y"]);
    let y = Polynomial::var(&yv, "y").expect("y");
    vec![
        Polynomial::one(&yv),
        &Polynomial::one(&yv) + &y,
        &Polynomial::from_int(&yv, 2) + &y.pow(2),
    ]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepCase {
    pub r: u32,
    pub p: usize,
    pub q: usize,
    pub m: i64,
    pub series: String,
    pub adapted: Verdict,
    pub pullback: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub cases: usize,
    pub agreements: usize,
    /// Cases where the pullback route lifts.
    pub lifts: usize,
    pub disagreements: Vec<SweepCase>,
}

/// Runs both routes on every `y^m g(y)`-shaped tensor over `Z_r` for the
/// given parameter ranges.
pub fn thm37_sweep(
    rs: RangeInclusive<u32>,
    pqmax: usize,
    ms: RangeInclusive<i64>,
    series: &[Polynomial],
) -> Result<SweepReport> {
    let mut report = SweepReport::default();
    for r in rs {
        let group = cyclic(r)?;
        let sigma = OrbitMap::of_group(&group)?;
        let chart = AdaptedChart::for_diagonal_group(&group)?;
        for p in 0..=pqmax {
            for q in 0..=pqmax {
                for m in ms.clone() {
                    for g in series {
                        let t = cyclic_test_tensor(g, m, p, q)?;
                        let a = decide_lift_adapted(&t, &chart, &[])?;
                        let b = lift_via_pullback(&t, &sigma, &group)?;
                        report.cases += 1;
                        if b.lifts() {
                            report.lifts += 1;
                        }
                        if a.verdict == b.verdict && same_lift(&a, &b, sigma.source_vars())? {
                            report.agreements += 1;
                        } else {
                            report.disagreements.push(SweepCase {
                                r,
                                p,
                                q,
                                m,
                                series: g.to_string(),
                                adapted: a.verdict,
                                pullback: b.verdict,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Tuples `(r, p, q, m)` where `m·r + (q−p)(r−1) ≥ 0` and
/// `m ≥ p − q − s` disagree.
pub fn inequality_sweep(
    rs: RangeInclusive<u32>,
    pqmax: usize,
    ms: RangeInclusive<i64>,
) -> (usize, Vec<(u32, usize, usize, i64)>) {
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in rs {
        let ri = r as i64;
        for p in 0..=pqmax {
            for q in 0..=pqmax {
                let d = p as i64 - q as i64;
                let s = d.div_euclid(ri);
                for m in ms.clone() {
                    checked += 1;
                    let mu_ok = m * ri - d * (ri - 1) >= 0;
                    let closed_ok = m >= d - s;
                    if mu_ok != closed_ok {
                        bad.push((r, p, q, m));
                    }
                }
            }
        }
    }
    (checked, bad)
}

/// Rewrites `T` in coordinates `w` related to `y` by `y_s = (1 + w_u)·w_s`
/// (all other coordinates unchanged), returning the pulled-back field and
/// the stratum `{w_s = 0}` with the same ramification.
pub fn unit_rescaling(
    t: &TensorField,
    stratum: &StratumModel,
    unit_coord: &str,
    new_coords: &Vars,
) -> Result<(TensorField, StratumModel)> {
    let y = t.coords();
    let n = y.len();
    if new_coords.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: new_coords.len(),
        });
    }
    let pos = |name: &str| {
        y.iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))
    };
    let s = pos(&stratum.stratum_coord)?;
    let u = pos(unit_coord)?;
    if s == u {
        return Err(Error::InvalidArgument("unit coordinate must differ from the stratum".into()));
    }
    let mut comps: Vec<Polynomial> = (0..n).map(|i| Polynomial::var_at(new_coords, i)).collect();
    comps[s] = &(&Polynomial::one(new_coords) + &comps[u]) * &comps[s];
    let psi = PolyMap::new(new_coords.clone(), y.clone(), comps)?;
    let moved = t.pullback(&psi)?;
    let new_stratum = StratumModel::new(new_coords, &new_coords[s], &stratum.slice_coord, stratum.ramification)?;
    Ok((moved, new_stratum))
}

/// Writes an invariant skew covariant form `ω` on `V` as `σ^* φ` and
/// returns the polynomial form `φ` on the orbit chart.
pub fn solomon_express(omega: &TensorField, sigma: &OrbitMap, group: &FiniteMatrixGroup) -> Result<TensorField> {
    if !group.is_reflection_group() {
        return Err(Error::NotReflectionGroup);
    }
    if omega.p() != 0 || !omega.is_skew() {
        return Err(Error::InvalidArgument("expected a skew covariant form".into()));
    }
    if !omega.is_invariant(group)? {
        return Err(Error::NotInvariant);
    }
    let map = sigma.to_map()?;
    let (adj, det) = map.inverse_jacobian()?;
    let z = map.source();
    let y = map.target();
    let omega = omega.with_coords(z)?;

    // φ∘σ has covariant slots transformed by J⁻¹ = adj / det.
    let pushed = omega.transform_slots(|_, _| unreachable!("no contravariant slots"), |j, a| adj[j][a].clone());
    let den = det.pow(omega.q() as u32);
    let mut comps = Vec::with_capacity(pushed.components().len());
    for (idx, f) in pushed.components() {
        let f = f.div_poly(&den)?;
        let poly = f.as_polynomial().ok_or_else(|| {
            Error::Internal(format!("component {idx:?} of the pushed-down form is not polynomial"))
        })?;
        let phi = express_in_generators(&poly, sigma)?.ok_or_else(|| {
            Error::Internal(format!("component {idx:?} is not a polynomial in the invariants"))
        })?;
        comps.push((idx.clone(), RationalFunction::from_poly(phi)));
    }
    let phi = TensorField::from_components(0, omega.q(), y, comps)?;
    if phi.pullback(&map)? != omega {
        return Err(Error::Internal("round trip through the orbit map failed".into()));
    }
    Ok(phi)
}

/// Necessary conditions for `f` between orbit charts to come from a
/// diffeomorphism of the quotients: `f` is invertible with the supplied
/// inverse and carries the source strata bijectively onto destination
/// strata with equal labels.
pub fn check_diffeo_conditions(
    f: &PolyMap,
    f_inv: &PolyMap,
    src: &[StratumModel],
    dst: &[StratumModel],
) -> Result<bool> {
    if !f.compose(f_inv)?.is_identity() || !f_inv.compose(f)?.is_identity() {
        return Err(Error::InverseMismatch);
    }
    if src.len() != dst.len() {
        return Ok(false);
    }
    let mut fits = vec![vec![false; dst.len()]; src.len()];
    for (i, s) in src.iter().enumerate() {
        let h = s.label_equation.with_vars(f.source())?;
        for (j, d) in dst.iter().enumerate() {
            if s.ramification != d.ramification {
                continue;
            }
            let pulled = f.apply(&d.label_equation)?;
            fits[i][j] = !pulled.is_zero() && pulled.exact_divide(&h)?.is_some();
        }
    }
    fn matching(fits: &[Vec<bool>], i: usize, used: &mut [bool]) -> bool {
        if i == fits.len() {
            return true;
        }
        for j in 0..used.len() {
            if fits[i][j] && !used[j] {
                used[j] = true;
                if matching(fits, i + 1, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    Ok(matching(&fits, 0, &mut vec![false; dst.len()]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{diagonal_cyclic, scalar, symmetric};

    fn yv() -> Vars {
        vars(&["y"])
    }

    #[test]
    fn residuum_examples() {
        let chart = AdaptedChart::for_diagonal_group(&cyclic(2).unwrap()).unwrap();
        let s = &chart.strata()[0];
        let dy = TensorField::vector(&yv(), "y").unwrap();
        let rep = residuum(&dy, s).unwrap();
        assert_eq!(rep.mu_s, Order::Finite(-1));
        assert_eq!(rep.per_summand[0].p_prime, 1);

        let y = Polynomial::var(&yv(), "y").unwrap();
        let euler = dy.mul_function(&y.into()).unwrap();
        assert_eq!(residuum(&euler, s).unwrap().mu_s, Order::Finite(1));

        for r in 2..=5 {
            let chart = AdaptedChart::for_diagonal_group(&cyclic(r).unwrap()).unwrap();
            let form = TensorField::covector(&yv(), "y").unwrap();
            assert_eq!(residuum(&form, &chart.strata()[0]).unwrap().mu_s, Order::Finite(r as i64 - 1));
        }
    }

    #[test]
    fn adapted_decisions_in_one_variable() {
        let chart = AdaptedChart::for_diagonal_group(&cyclic(2).unwrap()).unwrap();
        let bad = cyclic_test_tensor(&Polynomial::one(&yv()), -1, 0, 1).unwrap();
        let cert = decide_lift_adapted(&bad, &chart, &[]).unwrap();
        assert_eq!(cert.verdict, Verdict::Fails);
        assert!(matches!(cert.failure, Some(LiftFailure::Stratum { mu_s: -1, .. })));

        let good = cyclic_test_tensor(&Polynomial::one(&yv()), 0, 0, 1).unwrap();
        let cert = decide_lift_adapted(&good, &chart, &[]).unwrap();
        assert_eq!(cert.lifted.unwrap().to_string(), "2*z*d(z)");
    }

    #[test]
    fn two_strata_product_group() {
        let g = diagonal_cyclic(&[2, 3]).unwrap();
        let chart = AdaptedChart::for_diagonal_group(&g).unwrap();
        let y = chart.orbit_coords().clone();
        let y1 = Polynomial::var(&y, "y1").unwrap();
        let t = TensorField::covector(&y, "y2")
            .unwrap()
            .tensor_product(&TensorField::vector(&y, "y1").unwrap())
            .unwrap()
            .mul_function(&y1.into())
            .unwrap();
        let cert = decide_lift_adapted(&t, &chart, &[]).unwrap();
        let mus: Vec<Order> = cert.residua.iter().map(|r| r.mu_s).collect();
        assert_eq!(mus, vec![Order::Finite(1), Order::Finite(2)]);
        assert!(cert.lifts());
        let sigma = OrbitMap::of_group(&g).unwrap();
        assert!(cross_validate(&t, &sigma, &g, &chart).unwrap());
    }

    #[test]
    fn untracked_denominator_is_an_error() {
        let chart = AdaptedChart::for_diagonal_group(&cyclic(2).unwrap()).unwrap();
        let y = Polynomial::var(&yv(), "y").unwrap();
        let h = &Polynomial::one(&yv()) + &y;
        let t = TensorField::covector(&yv(), "y")
            .unwrap()
            .mul_function(&RationalFunction::new(Polynomial::one(&yv()), h.clone()).unwrap())
            .unwrap();
        assert!(matches!(decide_lift_adapted(&t, &chart, &[]), Err(Error::CannotCertify(_))));
        let cert = decide_lift_adapted(&t, &chart, &[h]).unwrap();
        assert!(matches!(cert.failure, Some(LiftFailure::OffStrata { order: -1, .. })));
    }

    #[test]
    fn closed_form_examples() {
        let one = Polynomial::one(&yv());
        let lift = lift_cyclic_1d(&one, 1, 1, 0, 2).unwrap().unwrap();
        assert_eq!(lift.to_string(), "(1/2)*z*ddy(z)");
        assert!(lift_cyclic_1d(&one, 0, 1, 0, 2).unwrap().is_none());
        let c = lift_cyclic_1d(&one, 0, 0, 0, 5).unwrap().unwrap();
        assert_eq!(c.to_string(), "1");
        assert!(lift_cyclic_1d(&one, 0, 0, 0, 1).is_err());
    }

    #[test]
    fn pullback_route_examples() {
        let g = cyclic(2).unwrap();
        let sigma = OrbitMap::of_group(&g).unwrap();
        let v = TensorField::vector(&yv(), "y").unwrap();
        assert!(!lift_via_pullback(&v, &sigma, &g).unwrap().lifts());

        let s2 = symmetric(2).unwrap();
        let sigma = OrbitMap::of_group(&s2).unwrap();
        let v = TensorField::vector(sigma.target_vars(), "y1").unwrap();
        // ∂/∂e1 pulls back to (z1 ∂/∂z1 − z2 ∂/∂z2)/(z1 − z2)
        assert!(!lift_via_pullback(&v, &sigma, &s2).unwrap().lifts());
    }

    #[test]
    fn divisors_and_strata() {
        let s3 = symmetric(3).unwrap();
        let d = reflection_divisor(&s3).unwrap();
        assert_eq!(d.terms().len(), 3);
        assert!(d.terms().iter().all(|(_, c)| *c == Order::Finite(2)));
        assert!(matches!(orbit_strata(&s3), Err(Error::NonDiagonal)));
        assert!(reflection_divisor(&scalar(2, 2).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn diffeo_label_matching() {
        let y = yv();
        let z2 = AdaptedChart::new(y.clone(), vars(&["z"]), &[2]).unwrap();
        let z3 = AdaptedChart::new(y.clone(), vars(&["z"]), &[3]).unwrap();
        let id = PolyMap::identity(&y);
        assert!(check_diffeo_conditions(&id, &id, z2.strata(), z2.strata()).unwrap());
        assert!(!check_diffeo_conditions(&id, &id, z2.strata(), z3.strata()).unwrap());
        let yp = Polynomial::var(&y, "y").unwrap();
        let f = PolyMap::new(y.clone(), y.clone(), vec![yp.scale(&Cyc::from_int(2))]).unwrap();
        let finv = PolyMap::new(y.clone(), y.clone(), vec![yp.scale(&Cyc::from_ratio(1, 2))]).unwrap();
        assert!(check_diffeo_conditions(&f, &finv, z2.strata(), z2.strata()).unwrap());
        assert_eq!(
            check_diffeo_conditions(&f, &f, z2.strata(), z2.strata()).unwrap_err(),
            Error::InverseMismatch
        );
    }
}
