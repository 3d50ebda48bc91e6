use thiserror::Error;

use crate::address::CanonicalVertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed address `{input}`: {reason}")]
    InvalidAddress { input: String, reason: String },

    #[error("level {requested} exceeds the depth cap of {cap}")]
    DepthCap { requested: usize, cap: usize },

    #[error("level {requested} exceeds the linear solver cap of {cap}")]
    SolverCap { requested: usize, cap: usize },

    #[error("vertex {vertex} is not in V_{level}")]
    NotInLevel {
        vertex: CanonicalVertex,
        level: usize,
    },

    #[error("vertex {0} is a boundary vertex; the graph Laplacian is only defined on V_m \\ V_0")]
    BoundaryVertex(CanonicalVertex),

    #[error("functions live on different levels ({left} vs {right})")]
    DomainMismatch { left: usize, right: usize },

    #[error("invalid spec field `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("vertical scaling factors {0:?} are not uniform")]
    NonUniform([f64; 3]),

    #[error("closed form requires d != 3/5, got d = {0}")]
    CriticalScaling(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("the Laplacian of this function does not exist on SG \\ V_0")]
    LaplacianNonexistent,

    #[error("linear system is singular (pivot {pivot} at row {row})")]
    SingularSystem { row: usize, pivot: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for this error: 1 input error, 3 resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DepthCap { .. } | Error::SolverCap { .. } => 3,
            _ => 1,
        }
    }
}
