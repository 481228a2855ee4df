//! Experiment configuration: a flat `key = value` text format with
//! `[section]` headers. Every key has a default; unknown sections or keys
//! are rejected. `serialize` emits every key, so parse → serialize → parse
//! is the identity.

use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use crate::replay::SamplingMode;
use crate::sim::{ResourceGridConfig, ScenarioConfig, VoipPhase};
use crate::sortmdp::{PreferenceVector, RewardNorms};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown key `{section}.{key}`")]
    UnknownKey { section: String, key: String },
    #[error("invalid value for `{section}.{key}`: {msg}")]
    BadValue {
        section: String,
        key: String,
        msg: String,
    },
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Radio,
    ToySort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolicyKind {
    RoundRobin,
    ProportionalFair,
    Qadra,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::RoundRobin => "round_robin",
            PolicyKind::ProportionalFair => "proportional_fair",
            PolicyKind::Qadra => "qadra",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PolicyConfig {
    pub td_policy: PolicyKind,
    pub voip_first: bool,
    pub pf_ema: f64,
    pub pf_floor: f64,
}

#[derive(Debug, Clone)]
pub struct RewardConfig {
    pub omega: Vec<f64>,
    pub fb_divisor: f64,
    pub voip_factor: f64,
    pub saturation_bits: u64,
    pub feature_time_cap: u64,
}

#[derive(Debug, Clone)]
pub struct NnArchConfig {
    pub encoder_dense: Vec<usize>,
    pub encoder_gru: Vec<usize>,
    pub q_hidden: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct TrainSection {
    pub total_ttis: u64,
    pub gamma: f64,
    pub lr: f64,
    pub batch_size: usize,
    pub n_actors: usize,
    pub sync_every_ttis: u64,
    pub target_period: u64,
    pub ttis_per_learner_step: u64,
    pub epsilon_base_start: f64,
    pub epsilon_base_end: f64,
    pub epsilon_horizon_ttis: u64,
    pub double_dqn: bool,
    pub max_grad_norm: f64,
    pub deterministic: bool,
    pub checkpoint_every_steps: u64,
    pub early_stop_accuracy: f64,
    pub early_stop_check_every: u64,
}

#[derive(Debug, Clone)]
pub struct ReplaySection {
    pub capacity: usize,
    pub warmup: usize,
    pub alpha: f64,
    pub beta0: f64,
    pub beta_horizon_steps: u64,
    pub priority_epsilon: f64,
    pub mode: SamplingMode,
}

#[derive(Debug, Clone)]
pub struct EvalSection {
    pub ttis: u64,
}

#[derive(Debug, Clone)]
pub struct RunSection {
    pub seed: u64,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone)]
pub struct ToySection {
    pub list_len: usize,
    pub value_range: u64,
    pub holdout: usize,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub task: Task,
    pub scenario: ScenarioConfig,
    pub grid: ResourceGridConfig,
    pub policy: PolicyConfig,
    pub reward: RewardConfig,
    pub nn: NnArchConfig,
    pub train: TrainSection,
    pub replay: ReplaySection,
    pub eval: EvalSection,
    pub run: RunSection,
    pub toy: ToySection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            task: Task::Radio,
            scenario: ScenarioConfig::default(),
            grid: ResourceGridConfig::default(),
            policy: PolicyConfig {
                td_policy: PolicyKind::Qadra,
                voip_first: false,
                pf_ema: 0.01,
                pf_floor: 1.0,
            },
            reward: RewardConfig {
                omega: vec![10.0, 0.1],
                fb_divisor: 200_000.0,
                voip_factor: 0.01,
                saturation_bits: 1_000_000,
                feature_time_cap: 0,
            },
            nn: NnArchConfig {
                encoder_dense: vec![6, 256, 128],
                encoder_gru: vec![64, 32, 32],
                q_hidden: vec![512, 256, 128, 64],
            },
            train: TrainSection {
                total_ttis: 200_000,
                gamma: 0.99,
                lr: 1e-4,
                batch_size: 32,
                n_actors: 4,
                sync_every_ttis: 10,
                target_period: 2500,
                ttis_per_learner_step: 4,
                epsilon_base_start: 1.0,
                epsilon_base_end: 0.4,
                epsilon_horizon_ttis: 100_000,
                double_dqn: true,
                max_grad_norm: 0.0,
                deterministic: true,
                checkpoint_every_steps: 0,
                early_stop_accuracy: 0.0,
                early_stop_check_every: 500,
            },
            replay: ReplaySection {
                capacity: 131_072,
                warmup: 20_000,
                alpha: 0.6,
                beta0: 0.4,
                beta_horizon_steps: 100_000,
                priority_epsilon: 1e-6,
                mode: SamplingMode::Prioritized,
            },
            eval: EvalSection { ttis: 60_000 },
            run: RunSection {
                seed: 1,
                out_dir: PathBuf::from("out"),
            },
            toy: ToySection {
                list_len: 4,
                value_range: 100,
                holdout: 200,
            },
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ExperimentConfig::default();
        let mut section = String::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('[') {
                if !line.ends_with(']') {
                    return Err(ConfigError::Parse {
                        line: ln + 1,
                        msg: "unterminated section header".into(),
                    });
                }
                section = line[1..line.len() - 1].trim().to_string();
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
                line: ln + 1,
                msg: "expected `key = value`".into(),
            })?;
            cfg.apply(&section, key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    fn apply(&mut self, section: &str, key: &str, value: &str) -> Result<(), ConfigError> {
        let unknown = || ConfigError::UnknownKey {
            section: section.to_string(),
            key: key.to_string(),
        };
        let bad = |msg: &str| ConfigError::BadValue {
            section: section.to_string(),
            key: key.to_string(),
            msg: msg.to_string(),
        };
        match section {
            "scenario" => match key {
                "task" => {
                    self.task = match value {
                        "radio" => Task::Radio,
                        "toysort" => Task::ToySort,
                        _ => return Err(bad("expected radio|toysort")),
                    }
                }
                "n_voip" => self.scenario.n_voip = parse_num(value, bad)?,
                "full_buffer" => self.scenario.full_buffer = parse_bool(value, bad)?,
                "voip_period_ttis" => self.scenario.voip_period_ttis = parse_num(value, bad)?,
                "voip_packet_bits" => self.scenario.voip_packet_bits = parse_num(value, bad)?,
                "voip_max_delay_s" => self.scenario.voip_max_delay_s = parse_num(value, bad)?,
                "voip_phase" => {
                    self.scenario.voip_phase = match value {
                        "aligned" => VoipPhase::Aligned,
                        "spread" => VoipPhase::Spread,
                        _ => return Err(bad("expected aligned|spread")),
                    }
                }
                _ => return Err(unknown()),
            },
            "grid" => match key {
                "prbs_per_direction" => self.grid.prbs_per_direction = parse_num(value, bad)?,
                "bits_per_prb" => self.grid.bits_per_prb = parse_num(value, bad)?,
                "pdcch_capacity" => self.grid.pdcch_capacity = parse_num(value, bad)?,
                "tti_duration_s" => self.grid.tti_duration_s = parse_num(value, bad)?,
                "bler" => self.grid.bler = parse_num(value, bad)?,
                _ => return Err(unknown()),
            },
            "policy" => match key {
                "td_policy" => {
                    self.policy.td_policy = match value {
                        "round_robin" => PolicyKind::RoundRobin,
                        "proportional_fair" => PolicyKind::ProportionalFair,
                        "qadra" => PolicyKind::Qadra,
                        _ => return Err(bad("expected round_robin|proportional_fair|qadra")),
                    }
                }
                "voip_first" => self.policy.voip_first = parse_bool(value, bad)?,
                "pf_ema" => self.policy.pf_ema = parse_num(value, bad)?,
                "pf_floor" => self.policy.pf_floor = parse_num(value, bad)?,
                _ => return Err(unknown()),
            },
            "reward" => match key {
                "omega" => self.reward.omega = parse_list(value, bad)?,
                "fb_divisor" => self.reward.fb_divisor = parse_num(value, bad)?,
                "voip_factor" => self.reward.voip_factor = parse_num(value, bad)?,
                "saturation_bits" => self.reward.saturation_bits = parse_num(value, bad)?,
                "feature_time_cap" => self.reward.feature_time_cap = parse_num(value, bad)?,
                _ => return Err(unknown()),
            },
            "nn" => match key {
                "encoder_dense" => self.nn.encoder_dense = parse_list(value, bad)?,
                "encoder_gru" => self.nn.encoder_gru = parse_list(value, bad)?,
                "q_hidden" => self.nn.q_hidden = parse_list(value, bad)?,
                _ => return Err(unknown()),
            },
            "train" => match key {
                "total_ttis" => self.train.total_ttis = parse_num(value, bad)?,
                "gamma" => self.train.gamma = parse_num(value, bad)?,
                "lr" => self.train.lr = parse_num(value, bad)?,
                "batch_size" => self.train.batch_size = parse_num(value, bad)?,
                "n_actors" => self.train.n_actors = parse_num(value, bad)?,
                "sync_every_ttis" => self.train.sync_every_ttis = parse_num(value, bad)?,
                "target_period" => self.train.target_period = parse_num(value, bad)?,
                "ttis_per_learner_step" => {
                    self.train.ttis_per_learner_step = parse_num(value, bad)?
                }
                "epsilon_base_start" => self.train.epsilon_base_start = parse_num(value, bad)?,
                "epsilon_base_end" => self.train.epsilon_base_end = parse_num(value, bad)?,
                "epsilon_horizon_ttis" => self.train.epsilon_horizon_ttis = parse_num(value, bad)?,
                "double_dqn" => self.train.double_dqn = parse_bool(value, bad)?,
                "max_grad_norm" => self.train.max_grad_norm = parse_num(value, bad)?,
                "deterministic" => self.train.deterministic = parse_bool(value, bad)?,
                "checkpoint_every_steps" => {
                    self.train.checkpoint_every_steps = parse_num(value, bad)?
                }
                "early_stop_accuracy" => self.train.early_stop_accuracy = parse_num(value, bad)?,
                "early_stop_check_every" => {
                    self.train.early_stop_check_every = parse_num(value, bad)?
                }
                _ => return Err(unknown()),
            },
            "replay" => match key {
                "capacity" => self.replay.capacity = parse_num(value, bad)?,
                "warmup" => self.replay.warmup = parse_num(value, bad)?,
                "alpha" => self.replay.alpha = parse_num(value, bad)?,
                "beta0" => self.replay.beta0 = parse_num(value, bad)?,
                "beta_horizon_steps" => self.replay.beta_horizon_steps = parse_num(value, bad)?,
                "priority_epsilon" => self.replay.priority_epsilon = parse_num(value, bad)?,
                "mode" => {
                    self.replay.mode = match value {
                        "uniform" => SamplingMode::Uniform,
                        "prioritized" => SamplingMode::Prioritized,
                        _ => return Err(bad("expected uniform|prioritized")),
                    }
                }
                _ => return Err(unknown()),
            },
            "eval" => match key {
                "ttis" => self.eval.ttis = parse_num(value, bad)?,
                _ => return Err(unknown()),
            },
            "run" => match key {
                "seed" => self.run.seed = parse_num(value, bad)?,
                "out_dir" => self.run.out_dir = PathBuf::from(value),
                _ => return Err(unknown()),
            },
            "toysort" => match key {
                "list_len" => self.toy.list_len = parse_num(value, bad)?,
                "value_range" => self.toy.value_range = parse_num(value, bad)?,
                "holdout" => self.toy.holdout = parse_num(value, bad)?,
                _ => return Err(unknown()),
            },
            _ => {
                return Err(ConfigError::UnknownKey {
                    section: section.to_string(),
                    key: key.to_string(),
                })
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.scenario.validate().map_err(ConfigError::Invalid)?;
        self.grid.validate().map_err(ConfigError::Invalid)?;
        self.arch().validate().map_err(ConfigError::Invalid)?;
        if self.reward.omega.len() != crate::sortmdp::N_GROUPS {
            return Err(ConfigError::Invalid(format!(
                "omega needs {} entries",
                crate::sortmdp::N_GROUPS
            )));
        }
        if self.reward.omega.iter().any(|w| !w.is_finite()) {
            return Err(ConfigError::Invalid("omega entries must be finite".into()));
        }
        if self.nn.encoder_dense[0] != crate::sortmdp::FEATURE_DIM {
            return Err(ConfigError::Invalid(format!(
                "encoder input dimension must be {}",
                crate::sortmdp::FEATURE_DIM
            )));
        }
        if self.train.batch_size == 0 || self.train.n_actors == 0 {
            return Err(ConfigError::Invalid(
                "batch_size and n_actors must be positive".into(),
            ));
        }
        if self.train.sync_every_ttis == 0 || self.train.ttis_per_learner_step == 0 {
            return Err(ConfigError::Invalid(
                "sync_every_ttis and ttis_per_learner_step must be positive".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.train.gamma) {
            return Err(ConfigError::Invalid("gamma must lie in [0, 1]".into()));
        }
        if self.train.epsilon_base_start <= 0.0
            || self.train.epsilon_base_start > 1.0
            || self.train.epsilon_base_end <= 0.0
            || self.train.epsilon_base_end > 1.0
        {
            return Err(ConfigError::Invalid(
                "epsilon schedule bases must lie in (0, 1]".into(),
            ));
        }
        if self.replay.capacity == 0 || self.replay.warmup == 0 {
            return Err(ConfigError::Invalid(
                "replay capacity and warmup must be positive".into(),
            ));
        }
        if self.replay.warmup > self.replay.capacity {
            return Err(ConfigError::Invalid(
                "replay warmup cannot exceed capacity".into(),
            ));
        }
        if self.replay.warmup < self.train.batch_size {
            return Err(ConfigError::Invalid(
                "replay warmup must cover at least one batch".into(),
            ));
        }
        if self.toy.list_len == 0 || self.toy.value_range < self.toy.list_len as u64 {
            return Err(ConfigError::Invalid(
                "toysort needs list_len >= 1 and value_range >= list_len".into(),
            ));
        }
        Ok(())
    }

    /// Small-network profile for the integer-sorting task; converges in a
    /// few thousand learner steps and early-stops on holdout accuracy.
    pub fn toy_profile(seed: u64) -> Self {
        let mut cfg = ExperimentConfig::default();
        cfg.task = Task::ToySort;
        cfg.toy.value_range = 50;
        cfg.nn = NnArchConfig {
            encoder_dense: vec![6, 48],
            encoder_gru: vec![24, 24],
            q_hidden: vec![48],
        };
        cfg.train.total_ttis = 220_000; // warm-up plus up to 50k learner steps
        cfg.train.lr = 1e-3;
        cfg.train.gamma = 0.9;
        cfg.train.target_period = 250;
        cfg.train.epsilon_horizon_ttis = 40_000;
        // stop well above the 95% bar so fresh lists clear it too
        cfg.train.early_stop_accuracy = 0.995;
        cfg.train.early_stop_check_every = 250;
        cfg.replay.capacity = 60_000;
        cfg.replay.warmup = 1_000;
        cfg.replay.beta_horizon_steps = 20_000;
        cfg.run.seed = seed;
        cfg
    }

    /// Reduced radio scenario (five VoIP users, small networks, short
    /// budget) for direction-of-effect experiments and determinism checks.
    /// The single-grant control budget makes the time-domain choice between
    /// the full buffer and the delay-bounded flows exclusive, so the
    /// preference vector's throughput/QoS trade-off is visible at desk
    /// scale. Packet framing, the delay bound, the discount horizon, and
    /// the VoIP normalization are rebalanced together so that serving,
    /// starving, and the credit for proactive service all live on the same
    /// desk-scale clock.
    pub fn radio_smoke_profile(seed: u64, omega: [f64; 2]) -> Self {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario.n_voip = 5;
        cfg.scenario.voip_period_ttis = 20;
        cfg.scenario.voip_max_delay_s = 0.01;
        cfg.grid.pdcch_capacity = 1;
        cfg.nn = NnArchConfig {
            encoder_dense: vec![6, 32],
            encoder_gru: vec![16, 16],
            q_hidden: vec![32],
        };
        cfg.reward.omega = omega.to_vec();
        cfg.reward.voip_factor = 0.1;
        cfg.reward.saturation_bits = 16_128;
        cfg.reward.feature_time_cap = 400;
        cfg.train.total_ttis = 60_000;
        cfg.train.gamma = 0.95;
        cfg.train.lr = 1e-3;
        cfg.train.epsilon_horizon_ttis = 20_000;
        cfg.train.target_period = 250;
        cfg.replay.capacity = 40_000;
        cfg.replay.warmup = 2_000;
        cfg.replay.beta_horizon_steps = 10_000;
        cfg.eval.ttis = 20_000;
        cfg.run.seed = seed;
        cfg
    }

    pub fn arch(&self) -> crate::nn::PolicyArch {
        crate::nn::PolicyArch {
            encoder_dense: self.nn.encoder_dense.clone(),
            encoder_gru: self.nn.encoder_gru.clone(),
            q_hidden: self.nn.q_hidden.clone(),
        }
    }

    pub fn omega(&self) -> PreferenceVector {
        PreferenceVector(self.reward.omega.clone())
    }

    pub fn limits(&self) -> crate::sortmdp::FeatureLimits {
        crate::sortmdp::FeatureLimits {
            saturation_bits: self.reward.saturation_bits,
            time_cap_ttis: self.reward.feature_time_cap,
        }
    }

    pub fn norms(&self) -> RewardNorms {
        RewardNorms {
            fb_divisor: self.reward.fb_divisor,
            voip_factor: self.reward.voip_factor,
        }
    }

    /// Emit the full configuration, every key explicit.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "[scenario]");
        let _ = writeln!(
            s,
            "task = {}",
            match self.task {
                Task::Radio => "radio",
                Task::ToySort => "toysort",
            }
        );
        let _ = writeln!(s, "n_voip = {}", self.scenario.n_voip);
        let _ = writeln!(s, "full_buffer = {}", self.scenario.full_buffer);
        let _ = writeln!(s, "voip_period_ttis = {}", self.scenario.voip_period_ttis);
        let _ = writeln!(s, "voip_packet_bits = {}", self.scenario.voip_packet_bits);
        let _ = writeln!(s, "voip_max_delay_s = {}", self.scenario.voip_max_delay_s);
        let _ = writeln!(
            s,
            "voip_phase = {}",
            match self.scenario.voip_phase {
                VoipPhase::Aligned => "aligned",
                VoipPhase::Spread => "spread",
            }
        );
        let _ = writeln!(s, "\n[grid]");
        let _ = writeln!(s, "prbs_per_direction = {}", self.grid.prbs_per_direction);
        let _ = writeln!(s, "bits_per_prb = {}", self.grid.bits_per_prb);
        let _ = writeln!(s, "pdcch_capacity = {}", self.grid.pdcch_capacity);
        let _ = writeln!(s, "tti_duration_s = {}", self.grid.tti_duration_s);
        let _ = writeln!(s, "bler = {}", self.grid.bler);
        let _ = writeln!(s, "\n[policy]");
        let _ = writeln!(s, "td_policy = {}", self.policy.td_policy.name());
        let _ = writeln!(s, "voip_first = {}", self.policy.voip_first);
        let _ = writeln!(s, "pf_ema = {}", self.policy.pf_ema);
        let _ = writeln!(s, "pf_floor = {}", self.policy.pf_floor);
        let _ = writeln!(s, "\n[reward]");
        let _ = writeln!(s, "omega = {}", join(&self.reward.omega));
        let _ = writeln!(s, "fb_divisor = {}", self.reward.fb_divisor);
        let _ = writeln!(s, "voip_factor = {}", self.reward.voip_factor);
        let _ = writeln!(s, "saturation_bits = {}", self.reward.saturation_bits);
        let _ = writeln!(s, "feature_time_cap = {}", self.reward.feature_time_cap);
        let _ = writeln!(s, "\n[nn]");
        let _ = writeln!(s, "encoder_dense = {}", join(&self.nn.encoder_dense));
        let _ = writeln!(s, "encoder_gru = {}", join(&self.nn.encoder_gru));
        let _ = writeln!(s, "q_hidden = {}", join(&self.nn.q_hidden));
        let _ = writeln!(s, "\n[train]");
        let _ = writeln!(s, "total_ttis = {}", self.train.total_ttis);
        let _ = writeln!(s, "gamma = {}", self.train.gamma);
        let _ = writeln!(s, "lr = {}", self.train.lr);
        let _ = writeln!(s, "batch_size = {}", self.train.batch_size);
        let _ = writeln!(s, "n_actors = {}", self.train.n_actors);
        let _ = writeln!(s, "sync_every_ttis = {}", self.train.sync_every_ttis);
        let _ = writeln!(s, "target_period = {}", self.train.target_period);
        let _ = writeln!(
            s,
            "ttis_per_learner_step = {}",
            self.train.ttis_per_learner_step
        );
        let _ = writeln!(s, "epsilon_base_start = {}", self.train.epsilon_base_start);
        let _ = writeln!(s, "epsilon_base_end = {}", self.train.epsilon_base_end);
        let _ = writeln!(
            s,
            "epsilon_horizon_ttis = {}",
            self.train.epsilon_horizon_ttis
        );
        let _ = writeln!(s, "double_dqn = {}", self.train.double_dqn);
        let _ = writeln!(s, "max_grad_norm = {}", self.train.max_grad_norm);
        let _ = writeln!(s, "deterministic = {}", self.train.deterministic);
        let _ = writeln!(
            s,
            "checkpoint_every_steps = {}",
            self.train.checkpoint_every_steps
        );
        let _ = writeln!(s, "early_stop_accuracy = {}", self.train.early_stop_accuracy);
        let _ = writeln!(
            s,
            "early_stop_check_every = {}",
            self.train.early_stop_check_every
        );
        let _ = writeln!(s, "\n[replay]");
        let _ = writeln!(s, "capacity = {}", self.replay.capacity);
        let _ = writeln!(s, "warmup = {}", self.replay.warmup);
        let _ = writeln!(s, "alpha = {}", self.replay.alpha);
        let _ = writeln!(s, "beta0 = {}", self.replay.beta0);
        let _ = writeln!(s, "beta_horizon_steps = {}", self.replay.beta_horizon_steps);
        let _ = writeln!(s, "priority_epsilon = {}", self.replay.priority_epsilon);
        let _ = writeln!(
            s,
            "mode = {}",
            match self.replay.mode {
                SamplingMode::Uniform => "uniform",
                SamplingMode::Prioritized => "prioritized",
            }
        );
        let _ = writeln!(s, "\n[eval]");
        let _ = writeln!(s, "ttis = {}", self.eval.ttis);
        let _ = writeln!(s, "\n[run]");
        let _ = writeln!(s, "seed = {}", self.run.seed);
        let _ = writeln!(s, "out_dir = {}", self.run.out_dir.display());
        let _ = writeln!(s, "\n[toysort]");
        let _ = writeln!(s, "list_len = {}", self.toy.list_len);
        let _ = writeln!(s, "value_range = {}", self.toy.value_range);
        let _ = writeln!(s, "holdout = {}", self.toy.holdout);
        s
    }
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_num<T: std::str::FromStr>(
    value: &str,
    bad: impl Fn(&str) -> ConfigError,
) -> Result<T, ConfigError> {
    value.parse().map_err(|_| bad("not a number"))
}

fn parse_bool(value: &str, bad: impl Fn(&str) -> ConfigError) -> Result<bool, ConfigError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(bad("expected true|false")),
    }
}

fn parse_list<T: std::str::FromStr>(
    value: &str,
    bad: impl Fn(&str) -> ConfigError,
) -> Result<Vec<T>, ConfigError> {
    value
        .split(',')
        .map(|p| p.trim().parse().map_err(|_| bad("bad list entry")))
        .collect()
}
