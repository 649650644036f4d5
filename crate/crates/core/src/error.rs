use alloc::string::String;

use crate::linalg::SolveReport;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// The free-space kernel was evaluated at coincident points.
    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("linear solve did not reach tolerance: {report}")]
    SolverFailure { report: SolveReport },

    #[error("singular or near-singular system (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("realizability violated: {0}")]
    Realizability(String),

    #[error("packing infeasible in {region}: density {density:.4} exceeds bound {bound:.4}")]
    PackingInfeasible {
        region: String,
        density: f64,
        bound: f64,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
