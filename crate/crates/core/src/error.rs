use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("eigenvalue gap {gap:e} below tolerance {tol:e}")]
    DegenerateSpectrum { gap: f64, tol: f64 },

    #[error("missing analytic derivative of order {0}")]
    MissingDerivative(usize),

    #[error("field exponent {0} outside the supported range 1..=32")]
    FieldExponent(u32),

    #[error("malformed seed: {0}")]
    Seed(String),

    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
