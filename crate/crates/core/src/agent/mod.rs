//! The learned time-domain scheduler: actor process (ε-greedy selection
//! sort), learner process (sequence-loss gradients over target networks),
//! and the exploration schedule connecting them.

pub mod actor;
pub mod learner;
pub mod schedule;

pub use actor::{actor_sort_tti, Actor, SortOutcome};
pub use learner::{
    dqn_target, sequence_grad, Learner, LearnerConfig, LearnerError, LearnerStats, SeqGradReport,
    TargetMode,
};
pub use schedule::{epsilon_schedule, ExplorationSchedule};
