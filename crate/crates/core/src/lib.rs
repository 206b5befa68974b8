//! Exact invariant theory for finite matrix groups and lifting of tensor
//! fields and linear connections from orbit spaces.
//!
//! The crate is layered bottom-up:
//!
//! * [`algebra`]: cyclotomic numbers, sparse polynomials, rational functions.
//! * [`group`]: closure of finite matrix groups, complex reflections and
//!   their hyperplanes.
//! * [`invariants`]: Reynolds operator, minimal homogeneous generators of the
//!   invariant ring, orbit map and its Jacobian.
//! * [`tensor`]: tensor fields with rational components, group action,
//!   pullback, divisors, connection transformation.
//! * [`lift`]: reflection divisor, reflection residuum, the two lifting
//!   decision routes and their cross-check, invariant-form expressibility,
//!   chart-diffeomorphism conditions.
//! * [`connection_lift`]: pole-pattern check and slice-level lift for
//!   connections near a reflection stratum.

pub mod algebra;
pub mod connection_lift;
pub mod error;
pub mod group;
pub mod invariants;
pub mod lift;
pub mod tensor;

pub use algebra::{
    rat_order, CyclotomicNumber, Matrix, Monomial, Order, Polynomial, RationalFunction, Vars,
};
pub use error::{Error, Result};
pub use group::{FiniteMatrixGroup, GroupElement, ReflectionHyperplane};
pub use invariants::{InvariantBasis, OrbitMap};
pub use tensor::{ChristoffelConnection, Divisor, PolyMap, TensorField};
