use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("theta series did not converge after {terms} term pairs at z = {z}")]
    NonConvergence { terms: usize, z: String },

    #[error("pole in {what}: denominator magnitude {magnitude:e} below threshold")]
    Pole { what: &'static str, magnitude: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index {index} out of range (largest allowed {max})")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("invalid permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("subspace leakage {leakage:e} exceeds {tol:e} while building {module}")]
    Leakage {
        module: String,
        leakage: f64,
        tol: f64,
    },

    #[error("module has an empty zero-weight space")]
    EmptyZeroWeight,

    #[error("unknown check {0:?}")]
    UnknownCheck(String),

    #[error("write failed: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;
