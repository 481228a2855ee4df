//! NR-style time/frequency-domain packet scheduling with a deep
//! Q-learning time-domain scheduler.
//!
//! The crate bundles a self-contained TTI-loop simulator ([`sim`]), the
//! round-robin / proportional-fair baselines ([`policies`]), a selection-sort
//! decision process over flow features ([`sortmdp`]), a small neural stack
//! with exact gradients ([`nn`]), a prioritized sequence replay buffer
//! ([`replay`]), the actor/learner pair ([`agent`]), and the experiment
//! harness with configuration, training, evaluation, and sweeps
//! ([`harness`]).

pub mod agent;
pub mod env;
pub mod harness;
pub mod nn;
pub mod policies;
pub mod replay;
pub mod sim;
pub mod sortmdp;

pub use agent::{Actor, Learner, LearnerConfig, TargetMode};
pub use env::{RadioEnv, SortEnv, ToySortEnv};
pub use nn::{ParamSet, PolicyArch, PolicyParams};
pub use replay::{ReplayBuffer, ReplayConfig, SamplingMode, SortSequence};
pub use sim::{
    DataFlow, Direction, FlowId, Packet, QosRequirement, ResourceGridConfig, ScenarioConfig,
    Simulator, TrafficGroup, Tti, TtiAllocation, VoipPhase,
};
pub use sortmdp::{FeatureStats, FeatureVector, PreferenceVector, RewardNorms, RewardVector};
