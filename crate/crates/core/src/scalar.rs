//! Integer scalar abstraction.
//!
//! Every exact algorithm in this crate is written against [`Int`], so the same code runs on
//! machine integers for quick experiments and on [`num_bigint::BigInt`] when sweeps need
//! headroom. The crate root fixes the arbitrary-precision instantiation as the default.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Signed integer type usable by the exact algorithms.
pub trait Int:
    Integer
    + Signed
    + Clone
    + FromPrimitive
    + ToPrimitive
    + Hash
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts a small literal. Panics only if `v` does not fit, which cannot happen for the
    /// supported types.
    fn lit(v: i64) -> Self {
        Self::from_i64(v).expect("literal fits in every supported integer type")
    }

    fn from_usize_checked(v: usize) -> Self {
        Self::from_usize(v).expect("index fits in every supported integer type")
    }
}

impl<T> Int for T where
    T: Integer
        + Signed
        + Clone
        + FromPrimitive
        + ToPrimitive
        + Hash
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Exact rational over an [`Int`].
pub type Rat<T> = Ratio<T>;

pub(crate) fn rat<T: Int>(v: T) -> Rat<T> {
    Ratio::from_integer(v)
}

/// Greatest common divisor of a slice (non-negative, zero for an empty or all-zero slice).
pub fn gcd_all<T: Int>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, v| acc.gcd(v))
}

/// Extended gcd returning `(g, x, y)` with `a*x + b*y = g >= 0`.
pub fn xgcd<T: Int>(a: &T, b: &T) -> (T, T, T) {
    let e = a.extended_gcd(b);
    if e.gcd.is_negative() {
        (-e.gcd, -e.x, -e.y)
    } else {
        (e.gcd, e.x, e.y)
    }
}

/// Largest `r >= 0` with `r*r <= n`; `n` must be non-negative.
pub fn isqrt<T: Int>(n: &T) -> T {
    debug_assert!(!n.is_negative());
    if n.is_zero() {
        return T::zero();
    }
    // Newton iteration from an upper bound.
    let mut x = n.clone();
    let two = T::lit(2);
    loop {
        let y = (x.clone() + n.clone() / x.clone()) / two.clone();
        if y >= x {
            return x;
        }
        x = y;
    }
}
