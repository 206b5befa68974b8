//! Sparse multivariate polynomials with cyclotomic coefficients.
//!
//! A polynomial carries its own ordered list of variable names; binary
//! operations on polynomials over different lists work on the union
//! (left operand's names first). Terms are kept in a `BTreeMap` under the
//! graded reverse lexicographic order, so iteration, printing and the
//! leading term are canonical.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_rational::BigRational;

use super::cyclotomic::CyclotomicNumber as Cyc;
use super::order::Order;
use crate::error::{Error, Result};

/// Ordered coordinate names shared between polynomials.
pub type Vars = Arc<[String]>;

/// Builds a shared variable list.
pub fn vars<S: AsRef<str>>(names: &[S]) -> Vars {
    names.iter().map(|s| s.as_ref().to_string()).collect()
}

/// Exponent vector; trailing zeros are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn new(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    /// `x_i^e`.
    pub fn var(i: usize, e: u32) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Monomial::new(v)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        Monomial::new((0..n).map(|i| self.exponent(i) + other.exponent(i)).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self / other`; requires `other.divides(self)`.
    pub fn div(&self, other: &Monomial) -> Monomial {
        Monomial::new(
            (0..self.0.len())
                .map(|i| self.exponent(i) - other.exponent(i))
                .collect(),
        )
    }

    /// Componentwise minimum.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        Monomial::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.min(b))
                .collect(),
        )
    }

    /// All exponent vectors of total degree `d` in `n` variables, in
    /// descending graded reverse lexicographic order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<Monomial> {
        fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(Monomial::new(prefix.clone()));
                prefix.pop();
                return;
            }
            for e in 0..=d {
                prefix.push(e);
                rec(n, d - e, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(Monomial::one());
            }
            return out;
        }
        rec(n, d, &mut Vec::new(), &mut out);
        out.sort_by(|a, b| b.cmp(a));
        out
    }

    fn remap(&self, map: &[usize]) -> Monomial {
        let mut v = Vec::new();
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let j = map[i];
            if v.len() <= j {
                v.resize(j + 1, 0);
            }
            v[j] = e;
        }
        Monomial::new(v)
    }
}

impl Ord for Monomial {
    /// Graded reverse lexicographic order.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in (0..n).rev() {
                let (a, b) = (self.exponent(i), other.exponent(i));
                if a != b {
                    return b.cmp(&a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug)]
pub struct Polynomial {
    vars: Vars,
    terms: BTreeMap<Monomial, Cyc>,
}

/// Union of two variable lists, `a`'s names first.
pub fn union_vars(a: &Vars, b: &Vars) -> Vars {
    if Arc::ptr_eq(a, b) || a[..] == b[..] {
        return Arc::clone(a);
    }
    if b.iter().all(|v| a.contains(v)) {
        return Arc::clone(a);
    }
    let mut out: Vec<String> = a.to_vec();
    for v in b.iter() {
        if !out.contains(v) {
            out.push(v.clone());
        }
    }
    out.into()
}

impl Polynomial {
    pub fn zero(vars: &Vars) -> Self {
        Polynomial {
            vars: Arc::clone(vars),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &Vars, c: Cyc) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn one(vars: &Vars) -> Self {
        Self::constant(vars, Cyc::one())
    }

    pub fn from_int(vars: &Vars, v: i64) -> Self {
        Self::constant(vars, Cyc::from_int(v))
    }

    /// The coordinate function with the given name.
    pub fn var(vars: &Vars, name: &str) -> Result<Self> {
        let i = vars
            .iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::UnknownCoordinate(name.to_string()))?;
        Ok(Self::var_at(vars, i))
    }

    pub fn var_at(vars: &Vars, i: usize) -> Self {
        Self::monomial(vars, Monomial::var(i, 1), Cyc::one())
    }

    pub fn monomial(vars: &Vars, m: Monomial, c: Cyc) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn from_terms(vars: &Vars, terms: impl IntoIterator<Item = (Monomial, Cyc)>) -> Self {
        let mut p = Self::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Cyc> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value when the polynomial is constant.
    pub fn as_constant(&self) -> Option<Cyc> {
        match self.terms.len() {
            0 => Some(Cyc::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(Monomial::degree);
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    pub fn homogeneous_component(&self, d: u32) -> Polynomial {
        Polynomial {
            vars: Arc::clone(&self.vars),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Leading term under graded reverse lexicographic order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Cyc)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Option<&Cyc> {
        self.leading_term().map(|(_, c)| c)
    }

    pub fn coeff(&self, m: &Monomial) -> Cyc {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Degree of the polynomial in one variable (0 when absent).
    pub fn degree_in(&self, name: &str) -> u32 {
        match self.vars.iter().position(|v| v == name) {
            Some(i) => self.terms.keys().map(|m| m.exponent(i)).max().unwrap_or(0),
            None => 0,
        }
    }

    fn add_term(&mut self, m: Monomial, c: Cyc) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get() + &c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    /// Re-expresses the polynomial over a superset of its variables.
    pub fn with_vars(&self, target: &Vars) -> Result<Polynomial> {
        if Arc::ptr_eq(&self.vars, target) || self.vars[..] == target[..] {
            return Ok(Polynomial {
                vars: Arc::clone(target),
                terms: self.terms.clone(),
            });
        }
        let used: Vec<bool> = (0..self.vars.len())
            .map(|i| self.terms.keys().any(|m| m.exponent(i) > 0))
            .collect();
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match target.iter().position(|t| t == v) {
                Some(j) => map.push(j),
                None if !used[i] => map.push(usize::MAX),
                None => return Err(Error::UnknownCoordinate(v.clone())),
            }
        }
        Ok(Polynomial {
            vars: Arc::clone(target),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.remap(&map), c.clone()))
                .collect(),
        })
    }

    fn aligned(&self, other: &Polynomial) -> (Polynomial, Polynomial) {
        let u = union_vars(&self.vars, &other.vars);
        (
            self.with_vars(&u).expect("union contains all variables"),
            other.with_vars(&u).expect("union contains all variables"),
        )
    }

    fn same_vars(&self, other: &Polynomial) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars[..] == other.vars[..]
    }

    pub fn scale(&self, c: &Cyc) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.vars);
        }
        Polynomial {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn scale_rational(&self, c: &BigRational) -> Polynomial {
        self.scale(&Cyc::from_rational(c.clone()))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Cyc) -> Polynomial {
        Polynomial {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(k, x)| (k.mul(m), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.vars);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// ∂/∂(name); zero when the variable does not occur.
    pub fn partial(&self, name: &str) -> Polynomial {
        match self.vars.iter().position(|v| v == name) {
            Some(i) => self.partial_at(i),
            None => Polynomial::zero(&self.vars),
        }
    }

    pub fn partial_at(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial::new(exps), c * &Cyc::from_int(e as i64));
        }
        out
    }

    /// Substitutes `images[i]` for the i-th variable. All images must share
    /// one variable list, which becomes the result's.
    pub fn compose_all(&self, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.vars.len(), "one image per variable");
        let target = images
            .iter()
            .fold(None::<Vars>, |acc, p| {
                Some(match acc {
                    None => Arc::clone(&p.vars),
                    Some(a) => union_vars(&a, &p.vars),
                })
            })
            .unwrap_or_else(|| Arc::clone(&self.vars));
        let images: Vec<Polynomial> = images
            .iter()
            .map(|p| p.with_vars(&target).expect("union"))
            .collect();
        let mut powers: Vec<Vec<Polynomial>> = images
            .iter()
            .map(|p| vec![Polynomial::one(&target), p.clone()])
            .collect();
        let mut out = Polynomial::zero(&target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let table = &mut powers[i];
                while table.len() <= e as usize {
                    let next = &table[table.len() - 1] * &table[1];
                    table.push(next);
                }
                t = &t * &table[e as usize];
            }
            out = &out + &t;
        }
        out
    }

    /// Substitutes polynomials for the named variables; unnamed variables
    /// are kept.
    pub fn compose(&self, images: &BTreeMap<String, Polynomial>) -> Polynomial {
        let mut target = Arc::clone(&self.vars);
        for p in images.values() {
            target = union_vars(&target, &p.vars);
        }
        let all: Vec<Polynomial> = self
            .vars
            .iter()
            .map(|v| match images.get(v) {
                Some(p) => p.clone(),
                None => Polynomial::var(&target, v).expect("kept variable"),
            })
            .collect();
        let mut out = self.compose_all(&all);
        if out.vars.is_empty() {
            out.vars = target;
        }
        out
    }

    pub fn evaluate(&self, values: &HashMap<String, Cyc>) -> Result<Cyc> {
        let mut acc = Cyc::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = values
                    .get(&self.vars[i])
                    .ok_or_else(|| Error::UnknownCoordinate(self.vars[i].clone()))?;
                t = &t * &v.pow(e as i64)?;
            }
            acc = &acc + &t;
        }
        Ok(acc)
    }

    /// `Some(q)` with `self = q * h` exactly, `None` if `h` does not divide.
    pub fn exact_divide(&self, h: &Polynomial) -> Result<Option<Polynomial>> {
        if h.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (p, h) = if self.same_vars(h) {
            (self.clone(), h.clone())
        } else {
            self.aligned(h)
        };
        if let Some(c) = h.as_constant() {
            return Ok(Some(p.scale(&c.inv()?)));
        }
        let (lm, lc) = h.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let lc_inv = lc.inv()?;
        let mut rem = p;
        let mut quot = Polynomial::zero(&rem.vars);
        while let Some((m, c)) = rem.leading_term().map(|(m, c)| (m.clone(), c.clone())) {
            if !lm.divides(&m) {
                return Ok(None);
            }
            let qm = m.div(&lm);
            let qc = &c * &lc_inv;
            for (hm, hc) in &h.terms {
                rem.add_term(hm.mul(&qm), -(hc * &qc));
            }
            quot.add_term(qm, qc);
        }
        Ok(Some(quot))
    }

    /// Largest `k` with `h^k | self`; infinite for the zero polynomial.
    pub fn multiplicity(&self, h: &Polynomial) -> Result<Order> {
        if h.as_constant().is_some() {
            return Err(Error::ConstantHypersurface);
        }
        if self.is_zero() {
            return Ok(Order::Infinite);
        }
        let mut k = 0i64;
        let mut cur = self.clone();
        while let Some(q) = cur.exact_divide(h)? {
            cur = q;
            k += 1;
        }
        Ok(Order::Finite(k))
    }

    /// Greatest monomial dividing every term (`1` for zero).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(),
            Some(first) => it.fold(first.clone(), |acc, m| acc.gcd(m)),
        }
    }

    pub fn div_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(k, c)| (k.div(m), c.clone())).collect(),
        }
    }

    /// Largest conductor appearing among the coefficients.
    pub fn conductor(&self) -> u32 {
        super::cyclotomic::common_conductor(self.terms.values())
    }
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        if self.same_vars(other) {
            return self.terms == other.terms;
        }
        let (a, b) = self.aligned(other);
        a.terms == b.terms
    }
}

impl Eq for Polynomial {}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        if !self.same_vars(rhs) {
            let (a, b) = self.aligned(rhs);
            return &a + &b;
        }
        let (mut big, small) = if self.terms.len() >= rhs.terms.len() {
            (self.clone(), rhs)
        } else {
            (rhs.clone(), self)
        };
        for (m, c) in &small.terms {
            big.add_term(m.clone(), c.clone());
        }
        big.vars = Arc::clone(&self.vars);
        big
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            vars: Arc::clone(&self.vars),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if !self.same_vars(rhs) {
            let (a, b) = self.aligned(rhs);
            return &a * &b;
        }
        let mut out = Polynomial::zero(&self.vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for Polynomial {
            type Output = Polynomial;
            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

pub(crate) fn fmt_monomial(vars: &[String], m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(vars[i].clone()),
            _ => parts.push(format!("{}^{}", vars[i], e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono = fmt_monomial(&self.vars, m);
            let rational = c.as_rational().is_some();
            let neg = rational && c.is_negative_display();
            let mag = if neg { -c } else { c.clone() };
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if mono.is_empty() {
                if mag.is_atomic() {
                    write!(f, "{mag}")?;
                } else {
                    write!(f, "({mag})")?;
                }
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else if mag.is_atomic() {
                write!(f, "{mag}*{mono}")?;
            } else {
                write!(f, "({mag})*{mono}")?;
            }
        }
        Ok(())
    }
}
