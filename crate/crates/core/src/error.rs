use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("curves live on different domains: [{0}, {1}] vs [{2}, {3}]")]
    DomainMismatch(f64, f64, f64, f64),
    #[error("curve `{label}` is undefined at theta = {theta}")]
    OutOfDomain { label: String, theta: f64 },
    #[error("curves {0} and {1} coincide on the grid")]
    DuplicateCurve(usize, usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("delta = {0} is not a negative power of two")]
    NotDyadic(f64),
    #[error("newton iteration did not converge at x1 = {x1} (residual {residual:e})")]
    NewtonDiverged { x1: f64, residual: f64 },
    #[error("f - g has more than two zeros: {roots:?}")]
    CinematicViolation { roots: Vec<f64> },
    #[error("fiber delta {fiber} does not match base delta {base}")]
    FiberMismatch { base: f64, fiber: f64 },
    #[error("raster and product are misaligned: {0}")]
    Misaligned(String),
    #[error("could not clear tangencies after {rounds} jitter rounds ({pairs} pairs left)")]
    Unperturbable { rounds: usize, pairs: usize },
    #[error("degenerate space curve: min |det(gamma, gamma', gamma'')| = {0:e}")]
    Degenerate(f64),
    #[error("invalid data: {0}")]
    BadData(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
