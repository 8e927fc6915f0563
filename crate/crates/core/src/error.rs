use thiserror::Error;

use crate::solver::SolveReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("field allocation of {points} points on an n={n} domain exceeds the cap of {cap} points")]
    MemoryCap { n: usize, points: usize, cap: usize },

    #[error("fields live on different domains")]
    DomainMismatch,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("{what} = {value} is out of range ({expected})")]
    OutOfRange {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("modulus inverse saturated: s = {s} exceeds omega(1) = {max}")]
    Saturated { s: f64, max: f64 },

    #[error("mollifier radius {r} is below four grid spacings ({spacing})")]
    KernelUnresolved { r: f64, spacing: f64 },

    #[error("mollifier radius {r} wraps around the torus")]
    KernelWraps { r: f64 },

    #[error("overflow guard: {what} = {value} exceeds {limit}")]
    Overflow {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("metric I + hessian is not positive: minimal eigenvalue {min_eig}")]
    NotPositive { min_eig: f64 },

    #[error("right-hand side violates compatibility: integral of e^F = {integral}")]
    Compatibility { integral: f64 },

    #[error("positivity could not be maintained at the minimal step (iteration {iteration}, min eigenvalue {min_eig})")]
    PositivityBreakdown {
        iteration: usize,
        min_eig: f64,
        last: Box<SolveReport>,
    },

    #[error("Newton iteration did not converge after {iterations} steps (residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last: Box<SolveReport>,
    },

    #[error("inputs are not a solution pair (residual {residual:e})")]
    NotASolution { residual: f64 },

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
