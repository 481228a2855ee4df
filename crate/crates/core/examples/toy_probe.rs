// Temporary diagnostic: toy-sort training dynamics (loss / accuracy / eps).
use std::sync::Arc;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;

use qadra::agent::{Actor, ExplorationSchedule, Learner, LearnerConfig};
use qadra::env::ToySortEnv;
use qadra::harness::{toy_greedy_accuracy, ExperimentConfig};
use qadra::nn::{init::init_policy, ParamSet};
use qadra::replay::{ReplayBuffer, ReplayConfig};
use qadra::sortmdp::FeatureAccumulator;

fn main() {
    let cfg = ExperimentConfig::toy_profile(7);
    let arch = cfg.arch();
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.run.seed ^ 0x51_7cc1);
    let initial = init_policy(&arch, &mut rng);
    let mut buffer = ReplayBuffer::new(ReplayConfig {
        capacity: cfg.replay.capacity,
        warmup: cfg.replay.warmup,
        alpha: cfg.replay.alpha,
        priority_epsilon: cfg.replay.priority_epsilon,
        mode: cfg.replay.mode,
    });
    let env = ToySortEnv::new(4, 100, ChaCha12Rng::seed_from_u64(1));
    let mut actor = Actor::new(
        env,
        Arc::new(ParamSet::new(initial.clone())),
        ChaCha12Rng::seed_from_u64(2),
    );
    let mut acc_stats = FeatureAccumulator::default();
    while !buffer.is_ready() {
        if let Some(seq) = actor.step_tti() {
            for x in &seq.xs_before {
                acc_stats.add(x);
            }
            buffer.push(seq).unwrap();
        }
    }
    let stats = Arc::new(acc_stats.finalize());
    println!("stats mean {:?} std {:?}", stats.mean, stats.std);
    actor.set_stats(stats.clone());
    let mut learner = Learner::new(
        arch.clone(),
        initial,
        LearnerConfig {
            gamma: cfg.train.gamma,
            batch_size: cfg.train.batch_size,
            lr: cfg.train.lr,
            target_period: cfg.train.target_period,
            double_dqn: cfg.train.double_dqn,
            beta0: cfg.replay.beta0,
            beta_horizon_steps: cfg.replay.beta_horizon_steps,
            max_grad_norm: None,
        },
        (*stats).clone(),
    );
    let mut lrng = ChaCha12Rng::seed_from_u64(3);
    let schedule = ExplorationSchedule {
        start: 1.0,
        end: 0.4,
        horizon_ttis: cfg.train.epsilon_horizon_ttis,
    };
    let holdout: Vec<Vec<f64>> = {
        let mut gen = ToySortEnv::new(4, 100, ChaCha12Rng::seed_from_u64(99));
        (0..200).map(|_| gen.random_list()).collect()
    };
    let mut ttis = 0u64;
    for step in 1..=20_000u64 {
        for _ in 0..4 {
            if let Some(seq) = actor.step_tti() {
                buffer.push(seq).unwrap();
            }
            ttis += 1;
            if actor.ttis() % 10 == 0 {
                actor.sync(
                    Arc::new(learner.online.clone()),
                    schedule.base_at(ttis),
                );
            }
        }
        let st = learner.step_batch(&mut buffer, &mut lrng).unwrap();
        if step % 500 == 0 {
            let acc = toy_greedy_accuracy(&learner.online.weights, &stats, &holdout);
            println!(
                "step {:6} loss {:10.4} td {:8.4} eps {:6.4} acc {:.3}",
                st.step,
                st.loss,
                st.mean_abs_td,
                actor.epsilon(),
                acc
            );
            if acc >= 0.99 {
                break;
            }
        }
    }
}
