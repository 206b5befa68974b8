//! Tensor fields with rational-function components, the linear group
//! action, pullback along polynomial maps, divisors and the transformation
//! law of linear connections.

mod connection;
mod divisor;
mod field;
mod map;

pub use connection::{connection_pullback, connection_transform, ChristoffelConnection};
pub use divisor::{tensor_divisor, Divisor};
pub use field::{Index, TensorField};
pub use map::PolyMap;

