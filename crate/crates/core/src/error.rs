use thiserror::Error;

/// Failures of the exact algorithms. Messages carry the offending values in decimal.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a negative discriminant (must be < 0 and congruent to 0 or 1 mod 4)")]
    InvalidDiscriminant(String),
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(String),
    #[error("form {0} is not positive definite")]
    NotPositiveDefinite(String),
    #[error("form {0} is not primitive")]
    Imprimitive(String),
    #[error("discriminants differ: {0} vs {1}")]
    DiscriminantMismatch(String, String),
    #[error("elements live in different fields: d_K = {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("{n} has a cofactor with no prime factor below the trial-division bound {bound}")]
    FactorizationBound { n: String, bound: u64 },
    #[error("no proper representation coprime to {modulus} with |x|,|y| <= {bound}")]
    SearchExhausted { modulus: String, bound: u64 },
    #[error("{value} is not properly represented by {form}")]
    NotRepresented { form: String, value: String },
    #[error("divisibility violated: {0}")]
    Divisibility(String),
    #[error("expected a rank-{expected} lattice, found rank {found}")]
    RankDefect { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
