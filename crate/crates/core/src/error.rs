use crate::pcmpc::OcpSolution;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The cable tension dropped below the taut-cable model's validity margin.
    #[error("slack cable: {0}")]
    SlackCable(String),
    /// Thrust-vector construction degenerated (near-zero desired acceleration norm).
    #[error("degenerate attitude: {0}")]
    DegenerateAttitude(String),
    #[error("ill-conditioned trajectory fit: {0}")]
    IllConditionedTrajectory(String),
    /// A tag detection is geometrically inconsistent with the taut-cable length.
    #[error("geometry inconsistent: {0}")]
    GeometryInconsistent(String),
    /// The OCP solver failed; carries the last feasible iterate so the caller
    /// can keep flying on it.
    #[error("solver failure: {reason}")]
    SolverFailure {
        reason: String,
        last: Box<OcpSolution>,
    },
    #[error("simulation diverged: {0}")]
    Diverged(String),
    #[error("config: {0}")]
    Config(String),
    #[error("log parse error at row {row}: {reason}")]
    LogParse { row: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
