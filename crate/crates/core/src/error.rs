use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty initial support")]
    EmptySupport,

    #[error("dimension mismatch: expected {expected} qubits, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: u64, n: usize },

    #[error("Krylov exponential did not converge to tolerance {tolerance:e} within {max_steps} steps")]
    KrylovNotConverged { tolerance: f64, max_steps: usize },

    #[error("{n} qubits exceeds the enumeration cap of {cap}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("problem has no feasible solution")]
    NoFeasibleSolution,

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("star center {0} is not a feasible solution")]
    StarCenterInfeasible(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("mixer not applicable: {0}")]
    MixerNotApplicable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
