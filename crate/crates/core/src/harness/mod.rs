//! Experiment harness: configuration, training and evaluation entry points,
//! the starvation sweep, and result export.

pub mod config;
pub mod eval;
pub mod io;
pub mod stats;
pub mod sweep;
pub mod train;

use thiserror::Error;

pub use config::{ConfigError, ExperimentConfig, PolicyKind, Task};
pub use eval::{run_eval, EvalOutcome, EvalSource, GreedyAgentPolicy, RunSummary};
pub use stats::{mean, percentile, percentiles};
pub use sweep::{starvation_sweep, SweepOutcome, SweepRow};
pub use train::{run_training, toy_greedy_accuracy, toy_holdout, TrainOutcome};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Checkpoint(#[from] crate::nn::checkpoint::CheckpointError),
    #[error(transparent)]
    Learner(#[from] crate::agent::LearnerError),
    #[error(transparent)]
    Replay(#[from] crate::replay::ReplayError),
    #[error("incompatible checkpoint: {0}")]
    IncompatibleCheckpoint(String),
    #[error("training aborted: non-finite loss at learner step {step}")]
    NonFiniteLoss { step: u64 },
    #[error("{0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}
