//! Exact arithmetic for binary quadratic forms, orders in imaginary quadratic fields, and
//! decompositions of singular abelian surfaces into products of CM elliptic curves.
//!
//! All algorithms are generic over the integer type (see [`scalar::Int`]). The aliases at
//! the crate root fix arbitrary-precision integers, which is what the CLI and the sweeps use.

pub mod classgroup;
pub mod decomposer;
pub mod error;
pub mod forms;
pub mod gcomp;
pub mod kmodules;
pub mod linalg;
pub mod numtheory;
pub mod periods;
pub mod scalar;

use num_bigint::BigInt;
use serde::{Serialize, Serializer};

pub use error::{Error, Result};
pub use scalar::{Int, Rat};

pub type Form = forms::QuadraticForm<BigInt>;
pub type Map = forms::UnimodularMap<BigInt>;
pub type Point = forms::KPoint<BigInt>;
pub type Class = classgroup::FormClass<BigInt>;
pub type Group = classgroup::ClassGroup<BigInt>;
pub type Element = kmodules::KElement<BigInt>;
pub type Module = kmodules::KModule<BigInt>;

/// Serializes an integer as a JSON number when it fits in `i64`, else as a decimal string.
pub struct JsonInt<'a, T>(pub &'a T);

impl<T: Int> Serialize for JsonInt<'_, T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => serializer.serialize_i64(v),
            None => serializer.serialize_str(&self.0.to_string()),
        }
    }
}
