use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(&'static str),
    #[error("size mismatch: start has {start} modules, goal has {goal}")]
    SizeMismatch { start: usize, goal: usize },
    #[error("linear configurations cannot be reconfigured")]
    LinearConfiguration,
    #[error("no isomorphism chain found after {samples} samples")]
    SearchExhausted { samples: usize },
    #[error("no schedulable action in any relaxation round")]
    ScheduleFailure,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(&'static str),
    #[error("configuration is not connected")]
    DisconnectedConfiguration,
    #[error("graph has no lattice embedding")]
    NoEmbedding,
    #[error("mapping does not preserve adjacency")]
    MappingInvalid,
    #[error("precondition violated: {0}")]
    Precondition(&'static str),
}
