use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("not strongly pseudoconvex: {0}")]
    NotPseudoconvex(String),
    #[error("not in standard form: {0}")]
    NotStandard(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("disc leaves the chart at ζ = {zeta}: |z| = {radius}")]
    ChartExit { zeta: String, radius: f64 },
    #[error("transversal normalization failed: {0}")]
    Normalization(String),
    #[error("Newton did not converge: {0}")]
    NoConvergence(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
