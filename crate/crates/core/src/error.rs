use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Both lengths are odd: `T_a` and `T_b` share the factor `c`, so no identity exists.
    #[error(
        "a = {0} and b = {1} are both odd: GCD(T_a, T_b) is nontrivial and the rod has a torsion mode (uncontrollable)"
    )]
    BothOdd(u64, u64),

    #[error("lengths share the common factor {0}; rescale the lengths by it first")]
    CommonFactor(u64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("invalid precision {0} bits (must be at least 53)")]
    InvalidPrecision(u32),

    #[error("operator order {operator} exceeds jet order {jet}")]
    OrderMismatch { operator: usize, jet: usize },

    #[error("time step {dt} exceeds the explicit stability bound {bound}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("unsupported target {0:?}: only sqrt(n) and finite decimal literals are supported")]
    NonQuadraticIrrationalUnsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
