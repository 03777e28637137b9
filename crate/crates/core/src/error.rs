use thiserror::Error;

use crate::poly::Poly;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("operation undefined for the zero polynomial")]
    ZeroPolynomial,

    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        best: Box<Poly>,
    },

    #[error("linear program: {0}")]
    LinearProgram(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
}

pub type Result<T> = std::result::Result<T, Error>;
