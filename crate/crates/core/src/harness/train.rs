//! Training orchestration.
//!
//! Two process topologies share the same building blocks: a fully
//! deterministic single-threaded interleaving (four actor TTIs round-robin,
//! then one learner step) and a threaded mode with free-running actor
//! workers feeding the learner through a shared buffer. The TTI budget
//! counts actor TTIs summed over all actors, warm-up included.

use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::agent::{actor_sort_tti, Actor, ExplorationSchedule, Learner, LearnerConfig};
use crate::env::{RadioEnv, SortEnv, ToySortEnv};
use crate::nn::checkpoint::Checkpoint;
use crate::nn::{init::init_policy, ParamSet, PolicyParams};
use crate::replay::{ReplayBuffer, ReplayConfig, SortSequence};
use crate::sim::Simulator;
use crate::sortmdp::{FeatureAccumulator, FeatureStats, FeatureVector, FEATURE_DIM};

use super::config::{ExperimentConfig, Task};
use super::io;
use super::HarnessError;

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub checkpoint_path: PathBuf,
    pub log_path: PathBuf,
    pub learner_steps: u64,
    pub total_ttis: u64,
    pub final_version: u64,
    pub early_stopped: bool,
}

// Distinct rng streams per role, derived from the run seed.
const SEED_INIT: u64 = 0x51_7cc1;
const SEED_LEARNER: u64 = 0x6c_0ffe;
const SEED_ACTOR: u64 = 0xac_7000;
const SEED_ENV: u64 = 0xe4_4000;
const SEED_HOLDOUT: u64 = 0x40_1d00;

fn make_env(cfg: &ExperimentConfig, actor_idx: usize) -> Box<dyn SortEnv + Send> {
    let env_seed = cfg.run.seed ^ (SEED_ENV + actor_idx as u64);
    match cfg.task {
        Task::Radio => {
            let sim = Simulator::new(&cfg.scenario, cfg.grid, env_seed);
            Box::new(RadioEnv::new(sim, cfg.omega(), cfg.norms(), cfg.limits()))
        }
        Task::ToySort => Box::new(ToySortEnv::new(
            cfg.toy.list_len,
            cfg.toy.value_range,
            ChaCha12Rng::seed_from_u64(env_seed),
        )),
    }
}

fn replay_config(cfg: &ExperimentConfig) -> ReplayConfig {
    ReplayConfig {
        capacity: cfg.replay.capacity,
        warmup: cfg.replay.warmup,
        alpha: cfg.replay.alpha,
        priority_epsilon: cfg.replay.priority_epsilon,
        mode: cfg.replay.mode,
    }
}

fn learner_config(cfg: &ExperimentConfig) -> LearnerConfig {
    LearnerConfig {
        gamma: cfg.train.gamma,
        batch_size: cfg.train.batch_size,
        lr: cfg.train.lr,
        target_period: cfg.train.target_period,
        double_dqn: cfg.train.double_dqn,
        beta0: cfg.replay.beta0,
        beta_horizon_steps: cfg.replay.beta_horizon_steps,
        max_grad_norm: if cfg.train.max_grad_norm > 0.0 {
            Some(cfg.train.max_grad_norm)
        } else {
            None
        },
    }
}

const LOG_HEADER: &str = "step,loss,mean_abs_td,epsilon,buffer_size,param_version\n";

fn log_line(stats: &crate::agent::LearnerStats, epsilon: f64) -> String {
    format!(
        "{},{},{},{},{},{}\n",
        stats.step, stats.loss, stats.mean_abs_td, epsilon, stats.buffer_len, stats.version
    )
}

/// Fixed holdout of toy lists for early stopping and acceptance checks.
pub fn toy_holdout(cfg: &ExperimentConfig) -> Vec<Vec<f64>> {
    let mut env = ToySortEnv::new(
        cfg.toy.list_len,
        cfg.toy.value_range,
        ChaCha12Rng::seed_from_u64(cfg.run.seed ^ SEED_HOLDOUT),
    );
    (0..cfg.toy.holdout).map(|_| env.random_list()).collect()
}

/// Fraction of lists the greedy policy sorts perfectly ascending.
pub fn toy_greedy_accuracy(
    weights: &PolicyParams,
    stats: &FeatureStats,
    lists: &[Vec<f64>],
) -> f64 {
    if lists.is_empty() {
        return 1.0;
    }
    let mut rng = ChaCha12Rng::seed_from_u64(0);
    let mut ok = 0usize;
    for values in lists {
        let xs: Vec<[f64; FEATURE_DIM]> = values
            .iter()
            .map(|&v| {
                let mut x = [0.0; FEATURE_DIM];
                x[0] = v;
                stats.normalize(&FeatureVector(x))
            })
            .collect();
        let out = actor_sort_tti(&xs, weights, 0.0, &mut rng);
        let sorted = out
            .order
            .windows(2)
            .all(|w| values[w[0]] <= values[w[1]]);
        if sorted {
            ok += 1;
        }
    }
    ok as f64 / lists.len() as f64
}

pub fn run_training(cfg: &ExperimentConfig) -> Result<TrainOutcome, HarnessError> {
    cfg.validate()?;
    if cfg.train.deterministic {
        run_training_deterministic(cfg)
    } else {
        run_training_threaded(cfg)
    }
}

fn initial_params(cfg: &ExperimentConfig) -> PolicyParams {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.run.seed ^ SEED_INIT);
    init_policy(&cfg.arch(), &mut rng)
}

fn finalize(
    cfg: &ExperimentConfig,
    learner: Option<&Learner>,
    initial: &PolicyParams,
    stats: Option<&FeatureStats>,
    log: &str,
    total_ttis: u64,
    early_stopped: bool,
) -> Result<TrainOutcome, HarnessError> {
    let arch = cfg.arch();
    let (params, steps) = match learner {
        Some(l) => (l.online.clone(), l.steps()),
        None => (ParamSet::new(initial.clone()), 0),
    };
    let final_version = params.version;
    let ckpt = Checkpoint {
        arch,
        params,
        limits: cfg.limits(),
        stats: stats.cloned(),
    };
    let checkpoint_path = cfg.run.out_dir.join("checkpoint.bin");
    if let Some(parent) = checkpoint_path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    ckpt.save(&checkpoint_path)?;
    let log_path = cfg.run.out_dir.join("training_log.csv");
    io::write_text(&log_path, log)?;
    Ok(TrainOutcome {
        checkpoint_path,
        log_path,
        learner_steps: steps,
        total_ttis,
        final_version,
        early_stopped,
    })
}

fn push_warmup_sequence(
    buffer: &mut ReplayBuffer,
    acc: &mut FeatureAccumulator,
    seq: SortSequence,
) -> Result<(), HarnessError> {
    for x in &seq.xs_before {
        acc.add(x);
    }
    buffer.push(seq)?;
    Ok(())
}

fn run_training_deterministic(cfg: &ExperimentConfig) -> Result<TrainOutcome, HarnessError> {
    let arch = cfg.arch();
    let initial = initial_params(cfg);
    let mut buffer = ReplayBuffer::new(replay_config(cfg));
    let mut acc = FeatureAccumulator::default();
    let first_snapshot = Arc::new(ParamSet::new(initial.clone()));
    let mut actors: Vec<Actor<Box<dyn SortEnv + Send>>> = (0..cfg.train.n_actors)
        .map(|i| {
            Actor::new(
                make_env(cfg, i),
                first_snapshot.clone(),
                ChaCha12Rng::seed_from_u64(cfg.run.seed ^ (SEED_ACTOR + i as u64)),
            )
        })
        .collect();
    let mut total_ttis: u64 = 0;
    let budget = cfg.train.total_ttis;
    let mut log = String::from(LOG_HEADER);

    // Warm-up: pure exploration until the buffer reaches its threshold.
    let mut cursor = 0usize;
    while !buffer.is_ready() && total_ttis < budget {
        let n_actors = actors.len();
        let actor = &mut actors[cursor % n_actors];
        cursor += 1;
        if let Some(seq) = actor.step_tti() {
            push_warmup_sequence(&mut buffer, &mut acc, seq)?;
        }
        total_ttis += 1;
    }
    if !buffer.is_ready() {
        // budget exhausted during warm-up: checkpoint the initialization
        let stats = if acc.count() > 0 {
            acc.finalize()
        } else {
            FeatureStats::identity()
        };
        return finalize(cfg, None, &initial, Some(&stats), &log, total_ttis, false);
    }

    let stats = Arc::new(acc.finalize());
    for actor in actors.iter_mut() {
        actor.set_stats(stats.clone());
    }
    let mut learner = Learner::new(
        arch.clone(),
        initial.clone(),
        learner_config(cfg),
        (*stats).clone(),
    );
    let mut learner_rng = ChaCha12Rng::seed_from_u64(cfg.run.seed ^ SEED_LEARNER);
    let schedule = ExplorationSchedule {
        start: cfg.train.epsilon_base_start,
        end: cfg.train.epsilon_base_end,
        horizon_ttis: cfg.train.epsilon_horizon_ttis,
    };
    let training_start = total_ttis;
    let holdout = if cfg.task == Task::ToySort && cfg.train.early_stop_accuracy > 0.0 {
        toy_holdout(cfg)
    } else {
        Vec::new()
    };
    let mut early_stopped = false;

    'training: while total_ttis < budget {
        for _ in 0..cfg.train.ttis_per_learner_step {
            if total_ttis >= budget {
                break;
            }
            let idx = cursor % actors.len();
            cursor += 1;
            let actor = &mut actors[idx];
            if let Some(seq) = actor.step_tti() {
                buffer.push(seq)?;
            }
            total_ttis += 1;
            if actor.ttis() % cfg.train.sync_every_ttis == 0 {
                let base = schedule.base_at(total_ttis.saturating_sub(training_start));
                actor.sync(Arc::new(learner.online.clone()), base);
            }
        }
        let stats_line = learner.step_batch(&mut buffer, &mut learner_rng)?;
        if !stats_line.loss.is_finite() {
            return Err(HarnessError::NonFiniteLoss {
                step: stats_line.step,
            });
        }
        log.push_str(&log_line(&stats_line, actors[0].epsilon()));
        if cfg.train.checkpoint_every_steps > 0
            && stats_line.step % cfg.train.checkpoint_every_steps == 0
        {
            let ckpt = Checkpoint {
                arch: arch.clone(),
                params: learner.online.clone(),
                limits: cfg.limits(),
                stats: Some((*stats).clone()),
            };
            let path = cfg
                .run
                .out_dir
                .join(format!("checkpoint_{:08}.bin", stats_line.step));
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            ckpt.save(&path)?;
        }
        if !holdout.is_empty() && stats_line.step % cfg.train.early_stop_check_every.max(1) == 0 {
            let acc_now = toy_greedy_accuracy(&learner.online.weights, &stats, &holdout);
            if acc_now >= cfg.train.early_stop_accuracy {
                early_stopped = true;
                break 'training;
            }
        }
    }
    finalize(
        cfg,
        Some(&learner),
        &initial,
        Some(&stats),
        &log,
        total_ttis,
        early_stopped,
    )
}

struct SharedState {
    buffer: Mutex<ReplayBuffer>,
    published: RwLock<Arc<ParamSet>>,
    stats: RwLock<Option<Arc<FeatureStats>>>,
    base_bits: AtomicU64,
    total_ttis: AtomicU64,
    stop: AtomicBool,
}

fn run_training_threaded(cfg: &ExperimentConfig) -> Result<TrainOutcome, HarnessError> {
    let arch = cfg.arch();
    let initial = initial_params(cfg);
    let shared = Arc::new(SharedState {
        buffer: Mutex::new(ReplayBuffer::new(replay_config(cfg))),
        published: RwLock::new(Arc::new(ParamSet::new(initial.clone()))),
        stats: RwLock::new(None),
        base_bits: AtomicU64::new(cfg.train.epsilon_base_start.to_bits()),
        total_ttis: AtomicU64::new(0),
        stop: AtomicBool::new(false),
    });
    let budget = cfg.train.total_ttis;

    let mut handles = Vec::new();
    for i in 0..cfg.train.n_actors {
        let shared = shared.clone();
        let env = make_env(cfg, i);
        let rng = ChaCha12Rng::seed_from_u64(cfg.run.seed ^ (SEED_ACTOR + i as u64));
        let snapshot = shared.published.read().unwrap().clone();
        let sync_every = cfg.train.sync_every_ttis;
        handles.push(std::thread::spawn(move || {
            let mut actor = Actor::new(env, snapshot, rng);
            let mut has_stats = false;
            loop {
                if shared.stop.load(Ordering::Relaxed) {
                    break;
                }
                let claimed = shared.total_ttis.fetch_add(1, Ordering::Relaxed);
                if claimed >= budget {
                    shared.total_ttis.fetch_sub(1, Ordering::Relaxed);
                    break;
                }
                if let Some(seq) = actor.step_tti() {
                    let mut buf = shared.buffer.lock().unwrap();
                    // push failures only happen for malformed sequences
                    let _ = buf.push(seq);
                }
                if actor.ttis() % sync_every == 0 {
                    if !has_stats {
                        if let Some(stats) = shared.stats.read().unwrap().clone() {
                            actor.set_stats(stats);
                            has_stats = true;
                        }
                    }
                    if has_stats {
                        let params = shared.published.read().unwrap().clone();
                        let base = f64::from_bits(shared.base_bits.load(Ordering::Relaxed));
                        actor.sync(params, base);
                    }
                }
            }
        }));
    }

    // Learner thread is this thread.
    let mut log = String::from(LOG_HEADER);
    let schedule = ExplorationSchedule {
        start: cfg.train.epsilon_base_start,
        end: cfg.train.epsilon_base_end,
        horizon_ttis: cfg.train.epsilon_horizon_ttis,
    };
    let wait_step = std::time::Duration::from_millis(2);
    let mut learner: Option<Learner> = None;
    let mut learner_rng = ChaCha12Rng::seed_from_u64(cfg.run.seed ^ SEED_LEARNER);
    let mut training_start = 0u64;
    let mut stats_arc: Option<Arc<FeatureStats>> = None;
    let result = loop {
        let ttis = shared.total_ttis.load(Ordering::Relaxed);
        if learner.is_none() {
            let ready = shared.buffer.lock().unwrap().is_ready();
            if ready {
                // derive feature statistics from the warm-up corpus
                let mut acc = FeatureAccumulator::default();
                {
                    let buf = shared.buffer.lock().unwrap();
                    buf.for_each_sequence(|seq| {
                        for x in &seq.xs_before {
                            acc.add(x);
                        }
                    });
                }
                let stats = Arc::new(acc.finalize());
                *shared.stats.write().unwrap() = Some(stats.clone());
                stats_arc = Some(stats.clone());
                learner = Some(Learner::new(
                    arch.clone(),
                    initial.clone(),
                    learner_config(cfg),
                    (*stats).clone(),
                ));
                training_start = ttis;
            } else if ttis >= budget {
                break Ok(None);
            } else {
                std::thread::park_timeout(wait_step);
                continue;
            }
        }
        if ttis >= budget {
            break Ok(learner);
        }
        let l = learner.as_mut().unwrap();
        let batch = {
            let buf = shared.buffer.lock().unwrap();
            buf.sample(cfg.train.batch_size, l.beta(), &mut learner_rng)
        };
        match batch {
            Ok(batch) => match l.step_sampled(batch) {
                Ok((mut line, updates)) => {
                    {
                        let mut buf = shared.buffer.lock().unwrap();
                        for (handle, prio) in updates {
                            buf.update_priority(handle, prio);
                        }
                        line.buffer_len = buf.len();
                    }
                    if !line.loss.is_finite() {
                        break Err(HarnessError::NonFiniteLoss { step: line.step });
                    }
                    *shared.published.write().unwrap() = Arc::new(l.online.clone());
                    let base = schedule.base_at(ttis.saturating_sub(training_start));
                    shared.base_bits.store(base.to_bits(), Ordering::Relaxed);
                    log.push_str(&log_line(&line, base));
                }
                Err(e) => break Err(e.into()),
            },
            Err(_) => {
                std::thread::park_timeout(wait_step);
            }
        }
    };
    shared.stop.store(true, Ordering::Relaxed);
    for h in handles {
        let _ = h.join();
    }
    let total = shared.total_ttis.load(Ordering::Relaxed);
    let fallback_stats = FeatureStats::identity();
    match result {
        Ok(learner) => finalize(
            cfg,
            learner.as_ref(),
            &initial,
            Some(stats_arc.as_deref().unwrap_or(&fallback_stats)),
            &log,
            total,
            false,
        ),
        Err(e) => Err(e),
    }
}
