//! Numerical `j`-invariants of CM points and the elliptic K3 models attached to the
//! decompositions found by `cmdecomp`.
//!
//! Everything upstream is exact; floating point lives only here, and every value carries an
//! absolute error bound.

mod complex;
pub mod jinvariant;
pub mod models;

pub use jinvariant::{format_decimal, format_value, j_invariant, reduce_to_fundamental_domain, to_bigint, JValue, DEFAULT_PRECISION};
pub use models::{class_polynomial, sandwich_model, shioda_inose_models, SandwichModel};

pub use astro_float::BigFloat;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] cmdecomp::Error),
    #[error("{bits}-bit precision needs more than {max_terms} series terms")]
    PrecisionUnattainable { bits: usize, max_terms: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Models over arbitrary-precision integers.
pub type Model = SandwichModel<num_bigint::BigInt>;
