use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An input or intermediate value is NaN or infinite.
    #[error("non-finite value in `{field}`")]
    NonFinite { field: &'static str },

    /// A constructor precondition was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The iterative eigensolver did not reach its threshold.
    #[error("eigensolver did not converge: off-diagonal residual {residual:.3e} after {sweeps} sweeps")]
    NoConvergence { residual: f64, sweeps: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
