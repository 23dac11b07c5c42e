use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An algorithm or caller produced a vector that is not a probability
    /// distribution.
    #[error("distribution contract violated: {0}")]
    DistributionContract(String),

    #[error("enumeration of {required} histories exceeds the cap of {cap}")]
    EnumerationCap { required: u128, cap: u64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// KL divergence with `supp(p)` not contained in `supp(q)`.
    #[error("divergence undefined: p has mass {mass} at index {index} where q is zero")]
    DivergenceUndefined { index: usize, mass: f64 },

    #[error("bound undefined: {0}")]
    BoundUndefined(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("distribution is not zero-affinity (affinity = {0})")]
    NotZeroAffinity(f64),
}
