use thiserror::Error;

/// Errors produced by the numerical core and the verification pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("coincident boundary points at phi = {phi}")]
    CoincidentPoints { phi: f64 },

    #[error("root not bracketed in {op}: f({lo}) = {f_lo}, f({hi}) = {f_hi}")]
    NoBracket {
        op: &'static str,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error("{op} did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence {
        op: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error(
        "critical point for q = {q} is not a local maximum (pivot {pivot:e} at index {index})"
    )]
    Saddle { q: usize, index: usize, pivot: f64 },

    #[error("quadrature on [{a}, {b}] failed to reach tolerance {tol:e}")]
    Quadrature { a: f64, b: f64, tol: f64 },

    #[error("decay fit: {0}")]
    Fit(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }
}
