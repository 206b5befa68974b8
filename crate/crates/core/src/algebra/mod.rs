//! Exact arithmetic: cyclotomic numbers, sparse polynomials, rational
//! functions and the linear algebra built on them.

pub mod cyclotomic;
pub mod linalg;
pub mod order;
pub mod poly;
pub mod ratfun;
mod upoly;

pub use cyclotomic::{CyclotomicNumber, DEFAULT_CONDUCTOR_MAX};
pub use linalg::{EchelonBasis, Matrix};
pub use order::Order;
pub use poly::{vars, Monomial, Polynomial, Vars};
pub use ratfun::{rat_order, RationalFunction};
