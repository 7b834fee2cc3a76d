//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("prefix of length {len} does not fit in {n} qubits")]
    InvalidPrefix { len: usize, n: usize },

    #[error("partial Hadamard precondition violated: {0}")]
    HadamardPrecondition(&'static str),

    #[error("state has {actual} qubits, operation expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("qubit index {qubit} out of range for {count}-qubit state")]
    InvalidQubit { qubit: usize, count: usize },

    #[error("branch probability below 1e-300: state annihilated, cannot renormalize")]
    ZeroProbabilityBranch,

    #[error("oracle size n={n} outside supported range [1, {max}]")]
    OracleSize { n: usize, max: usize },

    #[error("target {target} out of range for n={n}")]
    TargetOutOfRange { target: u64, n: usize },

    #[error("sublist size {0} is smaller than 2")]
    InvalidSublistSize(u64),

    #[error("matrix is singular (|det| below 1e-14)")]
    SingularMatrix,

    #[error("root power {0} is not a power of two >= 1")]
    InvalidRootPower(u32),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("both branches tested absent: target not found")]
    TargetNotFound,

    #[error("no clean chain within {max_restarts} restarts")]
    RestartBudgetExhausted { max_restarts: u32 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("n={n} exceeds the joint-state limit of {max}")]
    ResourceLimit { n: usize, max: usize },
}
