use thiserror::Error;

use crate::numeric::quadrature::QuadError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quadrature failure: {0}")]
    QuadratureFailure(#[from] QuadError),

    #[error("natural parameter {point:?} is outside the domain of the cumulant function")]
    OutsideDomain { point: Vec<f64> },

    #[error("mean parameter {point:?} is outside the interior of the convex support")]
    MeanOutsideDomain { point: Vec<f64> },

    #[error("no convergence after {iterations} iterations (gradient norm {gradient_norm:e})")]
    NoConvergence {
        iterations: usize,
        gradient_norm: f64,
    },

    #[error("oscillatory integral diverged: {0}")]
    OscillatoryDivergence(String),

    #[error("posterior normalizer vanished: {0}")]
    DegeneratePosterior(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("unknown built-in `{0}`")]
    UnknownBuiltin(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("invalid family: {0}")]
    InvalidFamily(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid constraint set: {0}")]
    InvalidConstraint(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("n = {n} exceeds enumeration cap {cap}")]
    TooLarge { n: usize, cap: usize },

    #[error("NaN produced while computing {0}")]
    NotANumber(&'static str),

    #[error("rate forms disagree: direct {direct:e} vs divergence form {divergence:e}")]
    FormMismatch { direct: f64, divergence: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub(crate) fn to_f64s<R: num_traits::ToPrimitive>(xs: &[R]) -> Vec<f64> {
    xs.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}
