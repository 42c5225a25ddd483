use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("representation construction failed: {0}")]
    Construction(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("no maximal eigenvalue of Lambda in {0}")]
    NoMaximalEigenvalue(String),

    #[error("integration failed at x = {re}{im:+}i: {reason}")]
    Integration { re: f64, im: f64, reason: String },

    #[error("non-generic ell: {0}")]
    NonGeneric(String),

    #[error("ill-conditioned Frobenius basis (condition {0:.3e})")]
    IllConditioned(f64),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("contour truncation: {0}")]
    Radius(String),

    #[error("eigenvalue iteration did not converge")]
    Eigen,
}

pub type Result<T> = std::result::Result<T, Error>;
