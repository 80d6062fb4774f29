use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A structural check on algebra or pair data failed.
    #[error("invalid algebra data: {0}")]
    InvalidAlgebra(String),

    /// The involution is not an involutive automorphism; carries the residual.
    #[error("involution rejected (residual {residual:.3e}): {reason}")]
    InvalidInvolution { reason: String, residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Evaluation outside the estimated domain of a holomorphic extension.
    #[error("outside continuation domain: |z - c| = {distance:.4} >= radius {radius:.4}")]
    Domain { distance: f64, radius: f64 },

    #[error("requested precision not reached: {0}")]
    Precision(String),

    #[error("overflow guard: {0}")]
    Overflow(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// The normal space of a germ does not yield tangent-preserving operators.
    #[error("section hypothesis violated (tangent invariance residual {0:.3e})")]
    SectionViolated(f64),

    /// Simultaneous diagonalization is unavailable; use the generic finder.
    #[error("not simultaneously diagonalizable: {0}")]
    NotDiagonalizable(String),

    #[error("degenerate induced metric: {0}")]
    Degenerate(String),

    #[error("unknown space '{name}'; catalog: {catalog}")]
    UnknownSpace { name: String, catalog: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}
