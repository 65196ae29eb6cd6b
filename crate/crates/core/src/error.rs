use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("network of {vertices} vertices exceeds the size budget of {budget}")]
    SizeOverflow { vertices: u128, budget: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("nonpositive conductance {conductance} on edge ({u}, {v})")]
    NonPositiveConductance { u: usize, v: usize, conductance: f64 },

    #[error("non-finite conductance {conductance} on edge ({u}, {v})")]
    NonFiniteConductance { u: usize, v: usize, conductance: f64 },

    #[error("vertex {vertex} out of range for a network of {vertices} vertices")]
    VertexOutOfRange { vertex: usize, vertices: usize },

    #[error("network is disconnected: vertex {0} is unreachable from the root")]
    Disconnected(usize),

    #[error("sink coincides with the root ({0})")]
    SinkIsRoot(usize),

    #[error("network has no sink")]
    MissingSink,

    #[error("unknown vertex {0}")]
    UnknownVertex(usize),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("no current escapes the root")]
    ZeroEscapeCurrent,

    #[error("positive flow loop through {0:?}")]
    PositiveLoop(Vec<usize>),

    #[error("positive flow enters the root from vertex {0}")]
    RootInflow(usize),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("objects belong to different networks")]
    NetworkMismatch,

    #[error("malformed {what}: {detail}")]
    Format { what: &'static str, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            detail: detail.into(),
        }
    }

    pub(crate) fn format(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Format {
            what,
            detail: detail.into(),
        }
    }
}
