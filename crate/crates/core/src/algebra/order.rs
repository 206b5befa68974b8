use std::fmt;
use std::ops::{Add, Neg, Sub};

/// Order of vanishing along a hypersurface: an integer, or `Infinite` for
/// the zero function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Order {
    Finite(i64),
    Infinite,
}

impl Order {
    pub fn finite(self) -> Option<i64> {
        match self {
            Order::Finite(v) => Some(v),
            Order::Infinite => None,
        }
    }

    pub fn is_nonnegative(self) -> bool {
        self >= Order::Finite(0)
    }
}

impl Add for Order {
    type Output = Order;
    fn add(self, rhs: Order) -> Order {
        match (self, rhs) {
            (Order::Finite(a), Order::Finite(b)) => Order::Finite(a + b),
            _ => Order::Infinite,
        }
    }
}

impl Add<i64> for Order {
    type Output = Order;
    fn add(self, rhs: i64) -> Order {
        self + Order::Finite(rhs)
    }
}

/// `a - b` where `b` is finite (subtracting infinity is not defined).
impl Sub<i64> for Order {
    type Output = Order;
    fn sub(self, rhs: i64) -> Order {
        self + Order::Finite(-rhs)
    }
}

impl Neg for Order {
    type Output = Order;
    /// Only meaningful for finite orders; infinity stays infinite.
    fn neg(self) -> Order {
        match self {
            Order::Finite(a) => Order::Finite(-a),
            Order::Infinite => Order::Infinite,
        }
    }
}

impl From<i64> for Order {
    fn from(v: i64) -> Self {
        Order::Finite(v)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(v) => write!(f, "{v}"),
            Order::Infinite => write!(f, "inf"),
        }
    }
}
