use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("ones-count {ones} outside the task domain {min}..={max}")]
    OutsideDomain { ones: u32, min: u32, max: u32 },

    #[error("invalid input pattern: {0}")]
    InvalidPattern(String),

    #[error("invalid task: {0}")]
    InvalidTask(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("task index {index} out of range for {count} output networks")]
    TaskIndex { index: usize, count: usize },

    #[error("training set {0} is empty")]
    EmptyTrainingSet(usize),

    #[error("training diverged at epoch {epoch}: non-finite empirical error")]
    Diverged { epoch: usize },

    #[error("no held-out tasks: every task in the family was a training task")]
    NoHeldOutTasks,

    #[error("archive verification failed: {0}")]
    ArchiveVerification(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
