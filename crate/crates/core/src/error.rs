use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("config parse error: {0}")]
    ConfigParse(String),

    #[error("initial-condition expression error: {0}")]
    Expression(String),

    #[error("entropy density is undefined for u <= 0 (got {0})")]
    EntropyDomain(f64),

    #[error("numerical blow-up: non-finite values at t = {t}")]
    BlowUp { t: f64 },

    #[error("conjugate gradient did not converge: residual {residual:.3e} after {iterations} iterations")]
    CgNoConvergence { residual: f64, iterations: usize },

    #[error("step rejected: fixed-point iteration did not converge within {iterations} iterations (t = {t}, dt = {dt:.3e})")]
    StepRejected { t: f64, dt: f64, iterations: usize },

    #[error("snapshot format error: {0}")]
    SnapshotFormat(String),

    #[error("snapshot payload error: {0}")]
    SnapshotPayload(String),

    #[error("report error: {0}")]
    Report(String),

    #[error("sweep error: {0}")]
    Sweep(String),

    #[error("diagnostics usage error: {0}")]
    DiagnosticsUsage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
