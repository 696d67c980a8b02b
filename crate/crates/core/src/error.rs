use thiserror::Error;

/// Errors shared by the whole crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("instance too large: {requested} leaves exceeds the budget of {budget}")]
    InstanceTooLarge { requested: u128, budget: usize },

    #[error("tree dimension must be at least 1, got {0}")]
    InvalidDimension(u32),

    #[error("exponent {0} is outside (1, inf)")]
    InvalidExponent(f64),

    #[error(
        "exponent triple ({0}, {1}, {2}) has 1/p1 + 1/p2 + 1/p3 < 1; \
         this regime is outside the supported range"
    )]
    UnsupportedExponents(f64, f64, f64),

    #[error("cube lies outside the tree (or outside the requested subtree)")]
    CubeOutOfRange,

    #[error("shape mismatch: {0}")]
    Mismatch(String),

    #[error("invalid value: {0}")]
    InvalidValue(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("instance spec: {0}")]
    Spec(String),

    #[error("certificate rejected: {0}")]
    CertificateRejected(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
