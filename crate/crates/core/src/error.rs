use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum QotError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not anti-Hermitian (deviation {deviation:.3e})")]
    NotAntiHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("eigendecomposition did not converge")]
    EigNonConvergence,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("truncation budget exceeded: tail mass {tail:.3e} > {limit:.1e}")]
    TruncationBudget { tail: f64, limit: f64 },

    #[error("grid inadequate: raw Husimi mass deficit {deficit:.3e}")]
    GridInadequate { deficit: f64 },

    #[error("coupling marginal violated: {0}")]
    MarginalViolation(String),

    #[error("support mismatch: component outside supp(rho) with norm {leak:.3e}")]
    SupportMismatch { leak: f64 },

    #[error("solver did not converge after {iterations} iterations (primal {primal:.3e}, dual {dual:.3e})")]
    NonConvergence {
        iterations: usize,
        primal: f64,
        dual: f64,
    },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, QotError>;
