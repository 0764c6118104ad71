use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("degenerate data: the profiled variance is not positive")]
    DegenerateData,

    #[error("I - rho*W is numerically singular at rho = {rho} (|1 - rho*lambda| = {gap:e})")]
    Singularity { rho: f64, gap: f64 },

    #[error("degenerate curvature: sigma2_2 = {0:e}")]
    DegenerateCurvature(f64),

    #[error("negative variance component: sigma2_1 = {0:e}")]
    NegativeVariance(f64),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("bootstrap failed: {0}")]
    Bootstrap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
