use thiserror::Error;

use crate::linsolve::SolveReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("array shape {got:?} does not match grid (expected {expected:?})")]
    Shape {
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("linear solve did not converge: {0:?}")]
    NotConverged(SolveReport),

    #[error(
        "incompatible Neumann right-hand side: mean component {mean_part:.3e} exceeds {limit:.3e}"
    )]
    IncompatibleRhs { mean_part: f64, limit: f64 },

    #[error("singular scalar equation at t = {t}: coefficient {coefficient:.3e}, b2 = {b2:.3e}")]
    SingularScalar { coefficient: f64, b2: f64, t: f64 },

    #[error("scalar quadratic has no real root: a = {a:.6e}, b = {b:.6e}, c = {c:.6e}")]
    NoRealRoot { a: f64, b: f64, c: f64 },

    #[error("state is missing history required by the second-order scheme")]
    MissingHistory,

    #[error("step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("undefined convergence rate: {0}")]
    UndefinedRate(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
