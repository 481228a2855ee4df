//! Actor side of the scheduler: ε-greedy selection sort over the TTI's flow
//! list, producing priority orders for the environment and sequence records
//! for the replay buffer.

use std::sync::Arc;

use rand::Rng;

use crate::env::SortEnv;
use crate::nn::{q_forward, ParamSet, PolicyParams};
use crate::replay::SortSequence;
use crate::sortmdp::{FeatureStats, FeatureVector};

use super::schedule::epsilon_schedule;

/// Result of sorting one input list.
#[derive(Debug, Clone)]
pub struct SortOutcome {
    /// Original indices in selection order (the output list).
    pub order: Vec<usize>,
    /// Raw action trace: each entry indexes the then-current input list.
    pub actions: Vec<usize>,
}

/// One ε-greedy selection-sort pass (the per-TTI inner loop of the actor).
///
/// The input state is encoded once from the full list before any selection;
/// the output state starts at zero and absorbs each chosen element. Greedy
/// choices maximize Q over the remaining elements with ties broken toward
/// the lowest remaining-list index.
pub fn actor_sort_tti<R: Rng>(
    xs_norm: &[[f64; crate::sortmdp::FEATURE_DIM]],
    params: &PolicyParams,
    epsilon: f64,
    rng: &mut R,
) -> SortOutcome {
    let n = xs_norm.len();
    assert!(n > 0, "cannot sort an empty list");
    let mut episode = crate::sortmdp::SortEpisode::new(
        xs_norm.iter().map(|x| FeatureVector(*x)).collect(),
    );
    let mut actions = Vec::with_capacity(n);
    // input encoding is computed lazily: a fully random pass never needs it
    let mut s_in: Option<Vec<f64>> = None;
    let mut out_state = params.output_encoder.zero_state();
    let mut s_out = vec![0.0; params.output_encoder.out_dim()];
    let track_states = epsilon < 1.0;
    while !episode.is_complete() {
        let len = episode.action_space_size();
        let explore = len > 1 && epsilon > 0.0 && rng.random::<f64>() < epsilon;
        let a = if len == 1 {
            0
        } else if explore {
            rng.random_range(0..len)
        } else {
            let s_in_ref = s_in.get_or_insert_with(|| {
                let xs: Vec<Vec<f64>> = xs_norm.iter().map(|x| x.to_vec()).collect();
                params.input_encoder.encode_list(&xs)
            });
            let mut best = 0usize;
            let mut best_q = f64::NEG_INFINITY;
            for (j, &idx) in episode.remaining().iter().enumerate() {
                let q = q_forward(&params.q_net, s_in_ref, &s_out, &xs_norm[idx]);
                if q > best_q {
                    best_q = q;
                    best = j;
                }
            }
            best
        };
        let idx = episode.remaining()[a];
        episode.step(a).expect("action index in range");
        actions.push(a);
        if track_states {
            s_out = params
                .output_encoder
                .step(&xs_norm[idx], &mut out_state);
        }
    }
    SortOutcome {
        order: episode.output().to_vec(),
        actions,
    }
}

/// Drives one environment instance: runs TTIs, emits completed sequences,
/// and refreshes its parameter snapshot and exploration rate on the sync
/// cadence.
pub struct Actor<E: SortEnv> {
    pub env: E,
    rng: rand_chacha::ChaCha12Rng,
    params: Arc<ParamSet>,
    stats: Option<Arc<FeatureStats>>,
    epsilon: f64,
    update_count: u64,
    ttis: u64,
    pending: Option<Pending>,
}

struct Pending {
    xs_before: Vec<FeatureVector>,
    actions: Vec<usize>,
    reward: f64,
}

impl<E: SortEnv> Actor<E> {
    pub fn new(env: E, params: Arc<ParamSet>, rng: rand_chacha::ChaCha12Rng) -> Self {
        Actor {
            env,
            rng,
            params,
            stats: None,
            epsilon: 1.0,
            update_count: 0,
            ttis: 0,
            pending: None,
        }
    }

    pub fn ttis(&self) -> u64 {
        self.ttis
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn param_version(&self) -> u64 {
        self.params.version
    }

    pub fn set_stats(&mut self, stats: Arc<FeatureStats>) {
        self.stats = Some(stats);
    }

    /// Parameter/exploration sync: adopt the published snapshot and derive
    /// the next exploration rate from the update counter and schedule base.
    pub fn sync(&mut self, params: Arc<ParamSet>, base: f64) {
        self.params = params;
        self.epsilon = epsilon_schedule(self.update_count, base);
        self.update_count += 1;
    }

    /// Force a fixed exploration rate (warm-up and greedy evaluation).
    pub fn set_epsilon(&mut self, epsilon: f64) {
        self.epsilon = epsilon;
    }

    /// Run one TTI. Returns the sequence completed by observing this TTI's
    /// input list as the successor state, if one was pending.
    pub fn step_tti(&mut self) -> Option<SortSequence> {
        let xs = self.env.advance();
        self.ttis += 1;
        let finished = self.pending.take().map(|p| SortSequence {
            xs_before: p.xs_before,
            actions: p.actions,
            reward: p.reward,
            xs_after: xs.clone(),
        });
        if !xs.is_empty() {
            let xs_norm: Vec<[f64; crate::sortmdp::FEATURE_DIM]> = match &self.stats {
                Some(stats) => xs.iter().map(|x| stats.normalize(x)).collect(),
                None => xs.iter().map(|x| x.0).collect(),
            };
            let outcome = actor_sort_tti(&xs_norm, &self.params.weights, self.epsilon, &mut self.rng);
            let reward = self.env.apply(&outcome.order);
            self.pending = Some(Pending {
                xs_before: xs,
                actions: outcome.actions,
                reward,
            });
        }
        finished
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    use crate::nn::{init::init_policy, PolicyArch};

    fn small_arch() -> PolicyArch {
        PolicyArch {
            encoder_dense: vec![6, 8],
            encoder_gru: vec![4],
            q_hidden: vec![8],
        }
    }

    fn constant_inputs(n: usize) -> Vec<[f64; 6]> {
        (0..n)
            .map(|i| {
                let mut x = [0.0; 6];
                x[0] = i as f64;
                x
            })
            .collect()
    }

    // ε = 1 must sample permutations uniformly: all 6 orders of a 3-element
    // list appear with probability ~1/6.
    #[test]
    fn full_exploration_is_uniform_over_permutations() {
        let params = small_arch().zeros();
        let xs = constant_inputs(3);
        let mut rng = ChaCha12Rng::seed_from_u64(123);
        let mut counts = std::collections::BTreeMap::new();
        let trials = 60_000;
        for _ in 0..trials {
            let out = actor_sort_tti(&xs, &params, 1.0, &mut rng);
            *counts.entry(out.order.clone()).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 6);
        for (perm, c) in counts {
            let p = c as f64 / trials as f64;
            assert!(
                (p - 1.0 / 6.0).abs() < 0.05 / 6.0 * 3.0,
                "permutation {perm:?} frequency {p}"
            );
        }
    }

    // ε = 0 with a zero-weight Q-network: all Q equal, the tie-break picks
    // the lowest remaining index, so the identity permutation comes out.
    #[test]
    fn greedy_tie_break_gives_identity_permutation() {
        let params = small_arch().zeros();
        let xs = constant_inputs(5);
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let out = actor_sort_tti(&xs, &params, 0.0, &mut rng);
        assert_eq!(out.order, vec![0, 1, 2, 3, 4]);
        assert_eq!(out.actions, vec![0, 0, 0, 0, 0]);
    }

    #[test]
    fn single_element_is_forced() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        let arch = small_arch();
        let params = init_policy(&arch, &mut rng);
        let xs = constant_inputs(1);
        for eps in [0.0, 0.5, 1.0] {
            let out = actor_sort_tti(&xs, &params, eps, &mut rng);
            assert_eq!(out.order, vec![0]);
            assert_eq!(out.actions, vec![0]);
        }
    }

    // Greedy determinism: identical parameters and inputs give identical
    // orders.
    #[test]
    fn greedy_is_deterministic() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let arch = small_arch();
        let params = init_policy(&arch, &mut rng);
        let xs: Vec<[f64; 6]> = (0..6)
            .map(|i| {
                let mut x = [0.0; 6];
                for (j, v) in x.iter_mut().enumerate() {
                    *v = ((i * 7 + j * 3) % 5) as f64 - 2.0;
                }
                x
            })
            .collect();
        let mut r1 = ChaCha12Rng::seed_from_u64(1);
        let mut r2 = ChaCha12Rng::seed_from_u64(2);
        let a = actor_sort_tti(&xs, &params, 0.0, &mut r1);
        let b = actor_sort_tti(&xs, &params, 0.0, &mut r2);
        assert_eq!(a.order, b.order);
        assert_eq!(a.actions, b.actions);
    }

    // Emitted actions always index the current remaining list, so stored
    // traces replay without range errors.
    #[test]
    fn action_traces_are_valid_selection_sorts() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        let arch = small_arch();
        let params = init_policy(&arch, &mut rng);
        for n in 1..8usize {
            let xs = constant_inputs(n);
            for eps in [0.0, 0.3, 1.0] {
                let out = actor_sort_tti(&xs, &params, eps, &mut rng);
                let seq = SortSequence {
                    xs_before: xs.iter().map(|x| FeatureVector(*x)).collect(),
                    actions: out.actions.clone(),
                    reward: 0.0,
                    xs_after: vec![],
                };
                seq.validate().unwrap();
            }
        }
    }
}
