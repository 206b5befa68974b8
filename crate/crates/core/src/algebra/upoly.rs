//! Dense univariate helpers over Q used by the cyclotomic field code.
//!
//! Polynomials are coefficient vectors, lowest degree first, with no
//! trailing zeros (the zero polynomial is the empty vector).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub(crate) type UPoly = Vec<BigRational>;

pub(crate) fn trim(p: &mut UPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub(crate) fn from_ints(c: &[BigInt]) -> UPoly {
    let mut p: UPoly = c.iter().cloned().map(BigRational::from_integer).collect();
    trim(&mut p);
    p
}

pub(crate) fn sub(a: &[BigRational], b: &[BigRational]) -> UPoly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
        let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
        out.push(x - y);
    }
    trim(&mut out);
    out
}

pub(crate) fn mul(a: &[BigRational], b: &[BigRational]) -> UPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Euclidean division; `b` must be nonzero.
pub(crate) fn divrem(a: &[BigRational], b: &[BigRational]) -> (UPoly, UPoly) {
    let mut r: UPoly = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![BigRational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = r.last().unwrap() / &lead;
        for (j, y) in b.iter().enumerate() {
            r[shift + j] -= &c * y;
        }
        q[shift] = c;
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Inverse of `a` modulo `m` via the extended Euclidean algorithm; `None`
/// when `gcd(a, m) != 1`.
pub(crate) fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<UPoly> {
    let (mut r0, mut r1): (UPoly, UPoly) = (m.to_vec(), a.to_vec());
    let (mut s0, mut s1): (UPoly, UPoly) = (Vec::new(), vec![BigRational::one()]);
    trim(&mut r1);
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let s = sub(&s0, &mul(&q, &s1));
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    if r0.len() != 1 {
        return None;
    }
    let inv = r0[0].recip();
    let mut out: UPoly = s0.into_iter().map(|c| c * &inv).collect();
    let (_, rem) = divrem(&out, m);
    out = rem;
    Some(out)
}
