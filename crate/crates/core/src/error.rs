use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid too small: {0}")]
    GridTooSmall(String),

    #[error("non-finite value in component {component} at ({i}, {j})")]
    NonFinite { component: usize, i: usize, j: usize },

    #[error("field map has {found} components but the target metric has dimension {expected}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("degenerate target metric at (X={fields:?}, x={point:?})")]
    DegenerateTarget { fields: Vec<f64>, point: [f64; 2] },

    #[error("degenerate base metric at x={0:?}")]
    DegenerateBase([f64; 2]),

    #[error("Weyl symmetry only defined for 2-dimensional base")]
    WeylDimension,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("axis not allowed for stationary model; use offset grid")]
    AxisOnGrid,

    #[error("singular point of the multipole series")]
    MultipoleOrigin,

    #[error("extension violates decoupling conditions: {0}")]
    Coupling(String),

    #[error("relaxation diverged; reduce over_relaxation (iteration {iteration}, residual {residual:e})")]
    Diverged { iteration: usize, residual: f64 },

    #[error("relaxation did not reach tolerance within {max_iters} iterations (residual {residual:e})")]
    MaxIterations { max_iters: usize, residual: f64 },

    #[error("evolution unstable at frame {frame} (t = {time})")]
    Unstable { frame: usize, time: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Coarse grouping used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Domain,
    Divergence,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Diverged { .. } | Error::MaxIterations { .. } | Error::Unstable { .. } => {
                ErrorKind::Divergence
            }
            Error::Parse(_) | Error::Io(_) | Error::Json(_) | Error::Config(_) => ErrorKind::Input,
            _ => ErrorKind::Domain,
        }
    }
}
