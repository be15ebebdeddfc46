use thiserror::Error;

/// Errors raised by the breather library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("measure is not finite: {0}")]
    NonFiniteMeasure(String),
    #[error("kernel is not even in time: mode {k} has imaginary part {imag:e}")]
    NotEven { k: i64, imag: f64 },
    #[error("kernel coefficients are only known up to |k| = {available}, mode {requested} requested")]
    KernelTruncated { requested: usize, available: usize },
    #[error("regular mode set is empty")]
    EmptyRegularSet,
    #[error("fields are defined on different grids or mode sets")]
    ModeMismatch,
    #[error("nonlinear kernel coefficient at mode {k} is {value:e}, expected > 0")]
    NonpositiveKernel { k: usize, value: f64 },
    #[error("{samples} time samples alias cubic products of degree-{k_max} fields (need at least {required})")]
    AliasRisk {
        samples: usize,
        k_max: usize,
        required: usize,
    },
    #[error("mode {k} is not elliptic: V_k = {value:e} at x = {x}")]
    NonElliptic { k: usize, x: f64, value: f64 },
    #[error("tridiagonal solve hit a vanishing pivot at row {row}")]
    SingularOperator { row: usize },
    #[error("quartic term is not positive (integral of h u^4 = {0:e})")]
    NoPositiveQuartic(f64),
    #[error("solver did not converge in {iterations} iterations (relative gradient {rel_grad:e})")]
    MaxIterExceeded { iterations: usize, rel_grad: f64 },
    #[error("no descent direction: step underflow at iteration {iteration}")]
    NoDescentDirection { iteration: usize },
    #[error("assumption {id} fails: {detail}")]
    AssumptionFailed { id: String, detail: String },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("artifact format error: {0}")]
    Format(String),
    #[error("checksum mismatch for {path}: expected {expected}, found {found}")]
    ChecksumMismatch {
        path: String,
        expected: String,
        found: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
