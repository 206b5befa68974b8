//! Exact arithmetic in cyclotomic fields Q(ζ_N).
//!
//! An element is stored in the power basis `1, ζ_N, …, ζ_N^{φ(N)-1}`
//! reduced modulo the N-th cyclotomic polynomial Φ_N. Elements of
//! different conductors are combined by embedding both into Q(ζ_lcm).
//! Any element whose non-constant coordinates vanish is stored with
//! conductor 1, so rational values always share one representation.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::upoly::{self, UPoly};
use crate::error::{Error, Result};

/// Default upper bound on conductors accepted from user input.
pub const DEFAULT_CONDUCTOR_MAX: u32 = 24;

/// Tables for one cyclotomic field.
#[derive(Debug)]
pub struct CyclotomicField {
    conductor: u32,
    degree: usize,
    /// Φ_N as integer coefficients, lowest degree first.
    phi: Vec<BigInt>,
    /// `powers[k]` holds ζ_N^k in the power basis, for `0 <= k < N`.
    powers: Vec<Vec<BigRational>>,
}

impl CyclotomicField {
    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    /// φ(N), the number of power-basis coordinates.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficients of Φ_N, lowest degree first.
    pub fn cyclotomic_polynomial(&self) -> &[BigInt] {
        &self.phi
    }

    fn phi_q(&self) -> UPoly {
        upoly::from_ints(&self.phi)
    }

    /// Reduces a raw polynomial in ζ_N (lowest degree first) to power-basis coordinates.
    fn reduce(&self, raw: &[BigRational]) -> Vec<BigRational> {
        let n = self.conductor as usize;
        let mut out = vec![BigRational::zero(); self.degree];
        for (k, c) in raw.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k < self.degree {
                out[k] += c;
            } else {
                for (o, p) in out.iter_mut().zip(&self.powers[k % n]) {
                    if !p.is_zero() {
                        *o += c * p;
                    }
                }
            }
        }
        out
    }
}

fn field_cache() -> &'static RwLock<HashMap<u32, Arc<CyclotomicField>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<CyclotomicField>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Returns the (cached) field Q(ζ_N).
pub fn field(conductor: u32) -> Arc<CyclotomicField> {
    assert!(conductor >= 1, "conductor must be positive");
    if let Some(f) = field_cache().read().unwrap().get(&conductor) {
        return Arc::clone(f);
    }
    let built = Arc::new(build_field(conductor));
    let mut cache = field_cache().write().unwrap();
    Arc::clone(cache.entry(conductor).or_insert(built))
}

fn cyclotomic_poly(n: u32) -> UPoly {
    // Φ_n = (x^n - 1) / ∏_{d | n, d < n} Φ_d
    let mut num: UPoly = vec![BigRational::zero(); n as usize + 1];
    num[0] = -BigRational::one();
    num[n as usize] = BigRational::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let f = field(d);
            let (q, r) = upoly::divrem(&num, &f.phi_q());
            debug_assert!(r.is_empty());
            num = q;
        }
    }
    num
}

fn build_field(conductor: u32) -> CyclotomicField {
    let phi_q = cyclotomic_poly(conductor);
    let degree = phi_q.len() - 1;
    let phi: Vec<BigInt> = phi_q.iter().map(|c| c.to_integer()).collect();

    let n = conductor as usize;
    let mut powers = Vec::with_capacity(n);
    let mut cur = vec![BigRational::zero(); degree];
    cur[0] = BigRational::one();
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x and reduce with the monic Φ_N
        let top = cur[degree - 1].clone();
        let mut next = vec![BigRational::zero(); degree];
        for i in (1..degree).rev() {
            next[i] = cur[i - 1].clone();
        }
        if !top.is_zero() {
            for (i, c) in phi_q.iter().take(degree).enumerate() {
                next[i] -= &top * c;
            }
        }
        cur = next;
    }
    CyclotomicField {
        conductor,
        degree,
        phi,
        powers,
    }
}

/// An exact element of Q(ζ_N).
#[derive(Clone, Debug)]
pub struct CyclotomicNumber {
    conductor: u32,
    coords: Vec<BigRational>,
}

impl CyclotomicNumber {
    pub fn zero() -> Self {
        Self::from_rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Self::from_rational(BigRational::one())
    }

    pub fn from_int(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_rational(v: BigRational) -> Self {
        Self {
            conductor: 1,
            coords: vec![v],
        }
    }

    /// The primitive root of unity ζ_N = exp(2πi/N).
    pub fn zeta(conductor: u32) -> Self {
        Self::zeta_pow(conductor, 1)
    }

    /// ζ_N^k for any integer k.
    pub fn zeta_pow(conductor: u32, k: i64) -> Self {
        let f = field(conductor);
        let e = k.rem_euclid(conductor as i64) as usize;
        Self::canonical(conductor, f.powers[e].clone())
    }

    /// Builds an element from power-basis coordinates in Q(ζ_N).
    pub fn from_coords(conductor: u32, coords: Vec<BigRational>) -> Result<Self> {
        let f = field(conductor);
        if coords.len() != f.degree {
            return Err(Error::DimensionMismatch {
                expected: f.degree,
                found: coords.len(),
            });
        }
        Ok(Self::canonical(conductor, coords))
    }

    fn canonical(conductor: u32, coords: Vec<BigRational>) -> Self {
        if conductor != 1 && coords.iter().skip(1).all(Zero::is_zero) {
            let c = coords.into_iter().next().unwrap_or_else(BigRational::zero);
            return Self::from_rational(c);
        }
        Self { conductor, coords }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.conductor == 1 && self.coords[0].is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.conductor == 1 && self.coords[0].is_one()
    }

    /// The value as a rational number, when it lies in Q.
    pub fn as_rational(&self) -> Option<&BigRational> {
        (self.conductor == 1).then(|| &self.coords[0])
    }

    /// Power-basis coordinates of this value inside Q(ζ_L); `L` must be a
    /// multiple of the conductor.
    pub fn coords_in(&self, target: u32) -> Vec<BigRational> {
        assert!(
            target.is_multiple_of(self.conductor),
            "conductor {} does not divide {}",
            self.conductor,
            target
        );
        if target == self.conductor {
            return self.coords.clone();
        }
        let f = field(target);
        let step = (target / self.conductor) as usize;
        let n = target as usize;
        let mut out = vec![BigRational::zero(); f.degree];
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(&f.powers[(k * step) % n]) {
                if !p.is_zero() {
                    *o += c * p;
                }
            }
        }
        out
    }

    fn common(&self, other: &Self) -> (u32, Vec<BigRational>, Vec<BigRational>) {
        let l = self.conductor.lcm(&other.conductor);
        (l, self.coords_in(l), other.coords_in(l))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            conductor: self.conductor,
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    /// Multiplicative inverse; errors on zero.
    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(r) = self.as_rational() {
            return Ok(Self::from_rational(r.recip()));
        }
        let f = field(self.conductor);
        let mut a = self.coords.clone();
        upoly::trim(&mut a);
        let inv = upoly::inverse_mod(&a, &f.phi_q())
            .ok_or_else(|| Error::Internal("non-invertible cyclotomic element".into()))?;
        let mut coords = inv;
        coords.resize(f.degree, BigRational::zero());
        Ok(Self::canonical(self.conductor, coords))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Integer power (negative exponents invert).
    pub fn pow(&self, e: i64) -> Result<Self> {
        let mut base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Multiplicative order when this is a root of unity inside its field;
    /// `None` otherwise (probed up to `2 * lcm(N, 2)`).
    pub fn root_of_unity_order(&self) -> Option<u32> {
        let bound = 2 * self.conductor.lcm(&2);
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_one() {
                return Some(k);
            }
            acc = &acc * self;
        }
        None
    }
}

impl Default for CyclotomicNumber {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialEq for CyclotomicNumber {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.coords == other.coords;
        }
        let (_, a, b) = self.common(other);
        a == b
    }
}

impl Eq for CyclotomicNumber {}

impl From<i64> for CyclotomicNumber {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<BigRational> for CyclotomicNumber {
    fn from(v: BigRational) -> Self {
        Self::from_rational(v)
    }
}

impl Add for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn add(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        if self.conductor == 1 && rhs.conductor == 1 {
            return CyclotomicNumber::from_rational(&self.coords[0] + &rhs.coords[0]);
        }
        let (l, a, b) = self.common(rhs);
        let coords = a.into_iter().zip(b).map(|(x, y)| x + y).collect();
        CyclotomicNumber::canonical(l, coords)
    }
}

impl Sub for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn sub(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        self + &(-rhs)
    }
}

impl Neg for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        CyclotomicNumber {
            conductor: self.conductor,
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn mul(self, rhs: &CyclotomicNumber) -> CyclotomicNumber {
        if let Some(r) = self.as_rational() {
            return rhs.scale(r);
        }
        if let Some(r) = rhs.as_rational() {
            return self.scale(r);
        }
        let (l, a, b) = self.common(rhs);
        let raw = upoly::mul(&a, &b);
        let f = field(l);
        CyclotomicNumber::canonical(l, f.reduce(&raw))
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for CyclotomicNumber {
            type Output = CyclotomicNumber;
            fn $m(self, rhs: CyclotomicNumber) -> CyclotomicNumber {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for CyclotomicNumber {
    type Output = CyclotomicNumber;
    fn neg(self) -> CyclotomicNumber {
        -&self
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.is_integer() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl CyclotomicNumber {
    /// True when printing needs no surrounding parentheses in a product.
    pub fn is_atomic(&self) -> bool {
        match self.as_rational() {
            Some(r) => r.is_integer() && !r.is_negative(),
            None => {
                self.coords.iter().filter(|c| !c.is_zero()).count() == 1
                    && self.coords.iter().all(|c| c.is_zero() || c.is_one())
            }
        }
    }

    /// Leading sign used by printers: true when the printed form starts with `-`.
    pub fn is_negative_display(&self) -> bool {
        self.coords
            .iter()
            .find(|c| !c.is_zero())
            .is_some_and(Signed::is_negative)
    }
}

impl fmt::Display for CyclotomicNumber {
    /// Prints `a + b*zeta(N) + c*zeta(N)^2 …`, re-readable by the session DSL.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return fmt_rational(r, f);
        }
        let mut first = true;
        for (k, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let base = match k {
                0 => String::new(),
                1 => format!("zeta({})", self.conductor),
                _ => format!("zeta({})^{}", self.conductor, k),
            };
            if k == 0 {
                fmt_rational(&mag, f)?;
            } else if mag.is_one() {
                write!(f, "{base}")?;
            } else {
                fmt_rational(&mag, f)?;
                write!(f, "*{base}")?;
            }
        }
        Ok(())
    }
}

/// Least common multiple of the conductors of the given numbers.
pub fn common_conductor<'a>(values: impl IntoIterator<Item = &'a CyclotomicNumber>) -> u32 {
    values.into_iter().fold(1u32, |acc, v| acc.lcm(&v.conductor))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: u32) -> CyclotomicNumber {
        CyclotomicNumber::zeta(n)
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        assert_eq!(&z(4) * &z(4), CyclotomicNumber::from_int(-1));
    }

    #[test]
    fn zeta3_plus_zeta3_squared_is_minus_one() {
        let s = &z(3) + &z(3).pow(2).unwrap();
        assert_eq!(s, CyclotomicNumber::from_int(-1));
        assert_eq!(s.conductor(), 1);
    }

    #[test]
    fn mixed_conductors_land_in_lcm_field() {
        let p = &z(6) * &z(4);
        assert_eq!(p.conductor(), 12);
        // ζ_6 ζ_4 = ζ_12^2 ζ_12^3 = ζ_12^5
        assert_eq!(p, CyclotomicNumber::zeta_pow(12, 5));
        // (ζ_12^2)^3 = -1, reduced directly in Q(ζ_12)
        let z12sq = CyclotomicNumber::zeta_pow(12, 2);
        assert_eq!(z12sq.pow(3).unwrap(), CyclotomicNumber::from_int(-1));
        assert_eq!(z12sq, z(6));
    }

    #[test]
    fn division_by_zero_errors() {
        assert_eq!(
            z(5).checked_div(&CyclotomicNumber::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn phi_degrees_and_roots() {
        for n in 1..=24u32 {
            let f = field(n);
            let totient = (1..=n).filter(|k| k.gcd(&n) == 1).count();
            assert_eq!(f.degree(), totient, "deg Φ_{n}");
            let zeta = z(n);
            assert!(zeta.pow(n as i64).unwrap().is_one(), "ζ_{n}^{n} = 1");
            // Φ_N(ζ_N) = 0, evaluated by Horner in Q(ζ_N)
            let mut acc = CyclotomicNumber::zero();
            for c in f.cyclotomic_polynomial().iter().rev() {
                acc = &(&acc * &zeta) + &CyclotomicNumber::from_rational(BigRational::from_integer(c.clone()));
            }
            assert!(acc.is_zero(), "Φ_{n}(ζ_{n}) = 0");
            assert_eq!(zeta.root_of_unity_order(), Some(n));
        }
    }

    #[test]
    fn inverse_round_trip() {
        let a = &(&z(7) + &CyclotomicNumber::from_int(3)) * &z(7).pow(3).unwrap();
        let b = a.inv().unwrap();
        assert!((&a * &b).is_one());
    }

    #[test]
    fn display_is_readable() {
        assert_eq!(z(3).to_string(), "zeta(3)");
        assert_eq!(CyclotomicNumber::from_ratio(-1, 2).to_string(), "-1/2");
        let w = &CyclotomicNumber::from_int(2) - &z(5).pow(2).unwrap();
        assert_eq!(w.to_string(), "2 - zeta(5)^2");
    }
}
