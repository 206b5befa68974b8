use std::fmt;

use crate::algebra::{Order, Polynomial};
use crate::error::{Error, Result};

use super::field::TensorField;

/// Formal combination `Σ c_S · S` of irreducible hypersurfaces, with
/// coefficients in Z ∪ {∞}.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Divisor {
    terms: Vec<(Polynomial, Order)>,
}

impl Divisor {
    pub fn new() -> Self {
        Divisor::default()
    }

    /// Adds `c · {h = 0}`; `h` is scaled to leading coefficient 1 and
    /// merged with a proportional hypersurface already present.
    pub fn push(&mut self, h: Polynomial, c: Order) -> Result<()> {
        let h = normalize(&h)?;
        match self.terms.iter_mut().find(|(g, _)| *g == h) {
            Some((_, old)) => *old = *old + c,
            None => self.terms.push((h, c)),
        }
        Ok(())
    }

    pub fn terms(&self) -> &[(Polynomial, Order)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient at `{h = 0}`, zero when `h` does not appear.
    pub fn coefficient(&self, h: &Polynomial) -> Order {
        let Ok(h) = normalize(h) else {
            return Order::Finite(0);
        };
        self.terms
            .iter()
            .find(|(g, _)| *g == h)
            .map(|(_, c)| *c)
            .unwrap_or(Order::Finite(0))
    }

    pub fn is_effective(&self) -> bool {
        self.terms.iter().all(|(_, c)| c.is_nonnegative())
    }
}

fn normalize(h: &Polynomial) -> Result<Polynomial> {
    if h.as_constant().is_some() {
        return Err(Error::ConstantHypersurface);
    }
    let lc = h.leading_coeff().expect("nonconstant").inv()?;
    Ok(h.scale(&lc))
}

/// Minimum over nonzero components of the order along each hypersurface;
/// the zero tensor gets `∞` everywhere.
pub fn tensor_divisor(t: &TensorField, hypersurfaces: &[Polynomial]) -> Result<Divisor> {
    let mut d = Divisor::new();
    for h in hypersurfaces {
        let mut c = Order::Infinite;
        for f in t.components().values() {
            c = c.min(f.order_along(h)?);
        }
        d.push(h.clone(), c)?;
    }
    Ok(d)
}

impl fmt::Display for Divisor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(h, c)| format!("{c}*{{{h} = 0}}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
