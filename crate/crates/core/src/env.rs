//! Environments the actor can drive: the radio simulator and a small
//! integer-sorting task used to validate the learning loop end to end.

use rand::Rng;
use rand_chacha::ChaCha12Rng;

use crate::policies::TdPolicy;
use crate::sim::{FlowId, Simulator};
use crate::sortmdp::{
    compute_reward_vector, extract_features, scalarize, FeatureLimits, FeatureVector,
    PreferenceVector, RewardNorms, RewardVector,
};

/// One decision point per TTI: `advance` produces the input list (possibly
/// empty), `apply` consumes the chosen order and returns the scalar reward.
pub trait SortEnv {
    fn advance(&mut self) -> Vec<FeatureVector>;
    fn apply(&mut self, order: &[usize]) -> f64;
}

impl<E: SortEnv + ?Sized> SortEnv for Box<E> {
    fn advance(&mut self) -> Vec<FeatureVector> {
        (**self).advance()
    }

    fn apply(&mut self, order: &[usize]) -> f64 {
        (**self).apply(order)
    }
}

/// Radio scheduling environment: the permutation becomes the time-domain
/// priority list, the frequency-domain pass and transmission happen, and the
/// preference-weighted reward vector is scalarized.
pub struct RadioEnv {
    pub sim: Simulator,
    pub omega: PreferenceVector,
    pub norms: RewardNorms,
    pub limits: FeatureLimits,
    current_ids: Vec<FlowId>,
    pub last_reward_vector: RewardVector,
}

impl RadioEnv {
    pub fn new(
        sim: Simulator,
        omega: PreferenceVector,
        norms: RewardNorms,
        limits: FeatureLimits,
    ) -> Self {
        RadioEnv {
            sim,
            omega,
            norms,
            limits,
            current_ids: Vec::new(),
            last_reward_vector: RewardVector {
                fb_bits: 0.0,
                voip_penalty: 0.0,
            },
        }
    }

    pub fn current_ids(&self) -> &[FlowId] {
        &self.current_ids
    }
}

impl SortEnv for RadioEnv {
    fn advance(&mut self) -> Vec<FeatureVector> {
        self.current_ids = self.sim.advance_tti();
        self.current_ids
            .iter()
            .map(|&id| extract_features(&self.sim, id, &self.limits))
            .collect()
    }

    fn apply(&mut self, order: &[usize]) -> f64 {
        let priority: Vec<FlowId> = order.iter().map(|&i| self.current_ids[i]).collect();
        let alloc = self.sim.fd_schedule(&priority);
        let report = self.sim.transmit(&alloc);
        let rv = compute_reward_vector(&self.sim, &report);
        self.last_reward_vector = rv;
        self.sim.metrics.rewards.push(crate::sim::RewardRecord {
            tti: self.sim.now(),
            fb_bits: rv.fb_bits,
            voip_penalty: rv.voip_penalty,
        });
        scalarize(&rv, &self.omega, &self.norms).expect("preference vector validated at config time")
    }
}

/// Run one TTI of a baseline policy over the simulator (no learning).
pub fn run_baseline_tti(sim: &mut Simulator, policy: &mut dyn TdPolicy) -> RewardVector {
    let ids = sim.advance_tti();
    let sorted = policy.sort_flows(sim, &ids);
    debug_assert_eq!(sorted.len(), ids.len());
    let alloc = sim.fd_schedule(&sorted);
    let report = sim.transmit(&alloc);
    policy.observe(sim, &ids, &report);
    let rv = compute_reward_vector(sim, &report);
    sim.metrics.rewards.push(crate::sim::RewardRecord {
        tti: sim.now(),
        fb_bits: rv.fb_bits,
        voip_penalty: rv.voip_penalty,
    });
    rv
}

/// Toy task: sort a short list of distinct integers. The terminal reward is
/// the negated inversion count of the produced order, so a perfect sort
/// earns zero and anything else is penalized.
pub struct ToySortEnv {
    pub list_len: usize,
    pub value_range: u64,
    rng: ChaCha12Rng,
    current: Vec<f64>,
}

impl ToySortEnv {
    pub fn new(list_len: usize, value_range: u64, rng: ChaCha12Rng) -> Self {
        assert!(list_len >= 1);
        assert!(value_range as usize >= list_len);
        ToySortEnv {
            list_len,
            value_range,
            rng,
            current: Vec::new(),
        }
    }

    pub fn random_list(&mut self) -> Vec<f64> {
        // distinct values via rejection; ranges are far larger than lists
        let mut vals: Vec<u64> = Vec::with_capacity(self.list_len);
        while vals.len() < self.list_len {
            let v = self.rng.random_range(0..self.value_range);
            if !vals.contains(&v) {
                vals.push(v);
            }
        }
        vals.into_iter().map(|v| v as f64).collect()
    }

    pub fn current_values(&self) -> &[f64] {
        &self.current
    }
}

/// Pairs out of order in `values` read in `order`.
pub fn inversion_count(values: &[f64], order: &[usize]) -> usize {
    let mut inv = 0;
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            if values[order[i]] > values[order[j]] {
                inv += 1;
            }
        }
    }
    inv
}

impl SortEnv for ToySortEnv {
    fn advance(&mut self) -> Vec<FeatureVector> {
        self.current = self.random_list();
        self.current
            .iter()
            .map(|&v| {
                let mut x = [0.0; 6];
                x[0] = v;
                FeatureVector(x)
            })
            .collect()
    }

    fn apply(&mut self, order: &[usize]) -> f64 {
        -(inversion_count(&self.current, order) as f64)
    }
}
