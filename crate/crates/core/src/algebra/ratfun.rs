//! Rational functions `num / den` over sparse polynomials.
//!
//! No multivariate gcd is computed. Normalization cancels the common
//! monomial content, collapses the fraction when one side divides the
//! other exactly, and scales so the denominator's leading coefficient is 1.
//! Further cancellation happens only against explicitly supplied factors
//! (see [`RationalFunction::cancel`]). Equality is cross-multiplication.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::cyclotomic::CyclotomicNumber as Cyc;
use super::order::Order;
use super::poly::{union_vars, Polynomial, Vars};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let u = union_vars(num.vars(), den.vars());
        let mut r = RationalFunction {
            num: num.with_vars(&u)?,
            den: den.with_vars(&u)?,
        };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(p: Polynomial) -> Self {
        let den = Polynomial::one(p.vars());
        RationalFunction { num: p, den }
    }

    pub fn zero(vars: &Vars) -> Self {
        Self::from_poly(Polynomial::zero(vars))
    }

    pub fn one(vars: &Vars) -> Self {
        Self::from_poly(Polynomial::one(vars))
    }

    pub fn constant(vars: &Vars, c: Cyc) -> Self {
        Self::from_poly(Polynomial::constant(vars, c))
    }

    pub fn num(&self) -> &Polynomial {
        &self.num
    }

    pub fn den(&self) -> &Polynomial {
        &self.den
    }

    pub fn vars(&self) -> &Vars {
        self.num.vars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The polynomial value when the denominator divides the numerator.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        if let Some(c) = self.den.as_constant() {
            return Some(self.num.scale(&c.inv().ok()?));
        }
        self.num.exact_divide(&self.den).ok().flatten()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.den = Polynomial::one(self.num.vars());
            return;
        }
        let content = self.num.monomial_content().gcd(&self.den.monomial_content());
        if !content.is_one() {
            self.num = self.num.div_monomial(&content);
            self.den = self.den.div_monomial(&content);
        }
        if self.den.as_constant().is_none() {
            if let Ok(Some(q)) = self.num.exact_divide(&self.den) {
                self.num = q;
                self.den = Polynomial::one(self.num.vars());
            } else if self.num.as_constant().is_none() {
                if let Ok(Some(q)) = self.den.exact_divide(&self.num) {
                    self.num = Polynomial::one(self.num.vars());
                    self.den = q;
                }
            }
        }
        let lc = self.den.leading_coeff().cloned().expect("nonzero denominator");
        if !lc.is_one() {
            let inv = lc.inv().expect("nonzero leading coefficient");
            self.num = self.num.scale(&inv);
            self.den = self.den.scale(&inv);
        }
    }

    /// Cancels the given factors from numerator and denominator as often as
    /// both remain divisible.
    pub fn cancel(&self, factors: &[Polynomial]) -> RationalFunction {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        for h in factors {
            if h.as_constant().is_some() {
                continue;
            }
            loop {
                let (Ok(Some(a)), Ok(Some(b))) = (num.exact_divide(h), den.exact_divide(h)) else {
                    break;
                };
                num = a;
                den = b;
            }
        }
        let mut r = RationalFunction { num, den };
        r.normalize();
        r
    }

    pub fn inv(&self) -> Result<RationalFunction> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, other: &RationalFunction) -> Result<RationalFunction> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, c: &Cyc) -> RationalFunction {
        let mut r = RationalFunction {
            num: self.num.scale(c),
            den: self.den.clone(),
        };
        r.normalize();
        r
    }

    pub fn mul_poly(&self, p: &Polynomial) -> RationalFunction {
        let mut r = RationalFunction {
            num: &self.num * p,
            den: self.den.with_vars(&union_vars(self.num.vars(), p.vars())).expect("union"),
        };
        r.normalize();
        r
    }

    pub fn div_poly(&self, p: &Polynomial) -> Result<RationalFunction> {
        RationalFunction::new(self.num.clone(), &self.den * p)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<RationalFunction> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        let mut r = RationalFunction {
            num: base.num.pow(k),
            den: base.den.pow(k),
        };
        r.normalize();
        Ok(r)
    }

    pub fn partial(&self, name: &str) -> RationalFunction {
        // (n/d)' = (n' d - n d') / d^2
        let dn = self.num.partial(name);
        let dd = self.den.partial(name);
        if dd.is_zero() {
            let mut r = RationalFunction {
                num: dn,
                den: self.den.clone(),
            };
            r.normalize();
            return r;
        }
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        RationalFunction::new(top, self.den.pow(2)).expect("nonzero denominator")
    }

    pub fn compose(&self, images: &BTreeMap<String, Polynomial>) -> Result<RationalFunction> {
        RationalFunction::new(self.num.compose(images), self.den.compose(images))
    }

    pub fn compose_all(&self, images: &[Polynomial]) -> Result<RationalFunction> {
        RationalFunction::new(self.num.compose_all(images), self.den.compose_all(images))
    }

    pub fn with_vars(&self, vars: &Vars) -> Result<RationalFunction> {
        Ok(RationalFunction {
            num: self.num.with_vars(vars)?,
            den: self.den.with_vars(vars)?,
        })
    }

    /// Order of vanishing along `{h = 0}`; `h` is assumed irreducible.
    pub fn order_along(&self, h: &Polynomial) -> Result<Order> {
        let n = self.num.multiplicity(h)?;
        let d = self.den.multiplicity(h)?;
        Ok(match (n, d) {
            (Order::Infinite, _) => Order::Infinite,
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a - b),
            (Order::Finite(_), Order::Infinite) => unreachable!("nonzero denominator"),
        })
    }

    /// True when the denominator divides the numerator exactly.
    pub fn is_polynomial(&self) -> bool {
        self.as_polynomial().is_some()
    }
}

/// Order of `f` along the irreducible hypersurface `{h = 0}`.
pub fn rat_order(f: &RationalFunction, h: &Polynomial) -> Result<Order> {
    f.order_along(h)
}

impl PartialEq for RationalFunction {
    fn eq(&self, other: &Self) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }
}

impl Eq for RationalFunction {}

impl From<Polynomial> for RationalFunction {
    fn from(p: Polynomial) -> Self {
        RationalFunction::from_poly(p)
    }
}

impl Add for &RationalFunction {
    type Output = RationalFunction;
    fn add(self, rhs: &RationalFunction) -> RationalFunction {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        let (num, den) = if self.den == rhs.den {
            (&self.num + &rhs.num, self.den.clone())
        } else if let Ok(Some(q)) = self.den.exact_divide(&rhs.den) {
            // rhs.den * q = self.den
            (&self.num + &(&rhs.num * &q), self.den.clone())
        } else if let Ok(Some(q)) = rhs.den.exact_divide(&self.den) {
            (&(&self.num * &q) + &rhs.num, rhs.den.clone())
        } else {
            (
                &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
                &self.den * &rhs.den,
            )
        };
        RationalFunction::new(num, den).expect("nonzero denominator")
    }
}

impl Sub for &RationalFunction {
    type Output = RationalFunction;
    fn sub(self, rhs: &RationalFunction) -> RationalFunction {
        self + &(-rhs)
    }
}

impl Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RationalFunction {
    type Output = RationalFunction;
    fn mul(self, rhs: &RationalFunction) -> RationalFunction {
        if self.is_zero() || rhs.is_zero() {
            let u = union_vars(self.vars(), rhs.vars());
            return RationalFunction::zero(&u);
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RationalFunction::from_poly(&self.num * &rhs.num);
        }
        RationalFunction::new(&self.num * &rhs.num, &self.den * &rhs.den)
            .expect("nonzero denominator")
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for RationalFunction {
            type Output = RationalFunction;
            fn $m(self, rhs: RationalFunction) -> RationalFunction {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        -&self
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let num = self.num.to_string();
        let den = self.den.to_string();
        let num = if num.contains(' ') { format!("({num})") } else { num };
        let den = if den.contains([' ', '*', '/']) { format!("({den})") } else { den };
        write!(f, "{num}/{den}")
    }
}
