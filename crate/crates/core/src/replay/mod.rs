//! Sequence replay buffer: whole sort episodes stored in a FIFO ring with
//! warm-up gating and prioritized sampling over a sum tree.

pub mod sum_tree;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sortmdp::FeatureVector;

use sum_tree::SumTree;

/// One replay record: the cloned input list, the action trace that sorted
/// it, the terminal scalar reward, and the next TTI's input list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SortSequence {
    pub xs_before: Vec<FeatureVector>,
    pub actions: Vec<usize>,
    pub reward: f64,
    pub xs_after: Vec<FeatureVector>,
}

impl SortSequence {
    /// A valid trace has one action per element and every action indexes the
    /// shrinking input list.
    pub fn validate(&self) -> Result<(), ReplayError> {
        let n = self.xs_before.len();
        if n == 0 {
            return Err(ReplayError::Malformed("empty input list".into()));
        }
        if self.actions.len() != n {
            return Err(ReplayError::Malformed(format!(
                "{} actions for {} elements",
                self.actions.len(),
                n
            )));
        }
        for (k, &a) in self.actions.iter().enumerate() {
            if a >= n - k {
                return Err(ReplayError::Malformed(format!(
                    "action {a} out of range at step {k} (remaining {})",
                    n - k
                )));
            }
        }
        if !self.reward.is_finite() {
            return Err(ReplayError::Malformed("non-finite reward".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("malformed sequence: {0}")]
    Malformed(String),
    #[error("buffer not ready: {size} of {warmup} warm-up sequences")]
    NotReady { size: usize, warmup: usize },
    #[error("batch size {batch} exceeds buffer size {size}")]
    BatchTooLarge { batch: usize, size: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SamplingMode {
    Uniform,
    Prioritized,
}

#[derive(Debug, Clone)]
pub struct ReplayConfig {
    pub capacity: usize,
    pub warmup: usize,
    pub alpha: f64,
    pub priority_epsilon: f64,
    pub mode: SamplingMode,
}

impl Default for ReplayConfig {
    fn default() -> Self {
        ReplayConfig {
            capacity: 131_072,
            warmup: 20_000,
            alpha: 0.6,
            priority_epsilon: 1e-6,
            mode: SamplingMode::Prioritized,
        }
    }
}

/// Stable reference to a stored sequence; survives until the slot is
/// overwritten by the FIFO ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeqHandle {
    seq_no: u64,
}

#[derive(Debug, Clone)]
pub struct Sampled {
    pub seq: SortSequence,
    pub weight: f64,
    pub handle: SeqHandle,
}

#[derive(Debug)]
struct Slot {
    seq_no: u64,
    seq: SortSequence,
}

#[derive(Debug)]
pub struct ReplayBuffer {
    cfg: ReplayConfig,
    slots: Vec<Option<Slot>>,
    next_seq: u64,
    size: usize,
    tree: SumTree,
    /// Running maximum of raw priorities; new sequences inherit it so they
    /// are sampled soon after arrival.
    max_priority: f64,
    stale_updates: u64,
}

impl ReplayBuffer {
    pub fn new(cfg: ReplayConfig) -> Self {
        assert!(cfg.capacity > 0);
        let capacity = cfg.capacity;
        ReplayBuffer {
            cfg,
            slots: (0..capacity).map(|_| None).collect(),
            next_seq: 0,
            size: 0,
            tree: SumTree::new(capacity),
            max_priority: 1.0,
            stale_updates: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn capacity(&self) -> usize {
        self.cfg.capacity
    }

    pub fn stale_updates(&self) -> u64 {
        self.stale_updates
    }

    pub fn max_priority(&self) -> f64 {
        self.max_priority
    }

    /// Training may start once the warm-up threshold is reached.
    pub fn is_ready(&self) -> bool {
        self.size >= self.cfg.warmup
    }

    pub fn push(&mut self, seq: SortSequence) -> Result<SeqHandle, ReplayError> {
        seq.validate()?;
        let seq_no = self.next_seq;
        self.next_seq += 1;
        let slot = (seq_no % self.cfg.capacity as u64) as usize;
        if self.slots[slot].is_none() {
            self.size += 1;
        }
        self.slots[slot] = Some(Slot { seq_no, seq });
        self.tree.set(slot, self.priority_key(self.max_priority));
        Ok(SeqHandle { seq_no })
    }

    fn priority_key(&self, raw: f64) -> f64 {
        match self.cfg.mode {
            SamplingMode::Uniform => 1.0,
            SamplingMode::Prioritized => raw.powf(self.cfg.alpha),
        }
    }

    /// Draw `batch` sequences with probability proportional to priority^alpha
    /// and return them with importance weights `(N·P)^-beta`, normalized by
    /// the batch maximum.
    pub fn sample<R: Rng>(
        &self,
        batch: usize,
        beta: f64,
        rng: &mut R,
    ) -> Result<Vec<Sampled>, ReplayError> {
        if !self.is_ready() {
            return Err(ReplayError::NotReady {
                size: self.size,
                warmup: self.cfg.warmup,
            });
        }
        if batch > self.size {
            return Err(ReplayError::BatchTooLarge {
                batch,
                size: self.size,
            });
        }
        let total = self.tree.total();
        let n = self.size as f64;
        let mut out = Vec::with_capacity(batch);
        let mut w_max = 0.0f64;
        for _ in 0..batch {
            let slot = match self.cfg.mode {
                SamplingMode::Uniform => rng.random_range(0..self.size),
                SamplingMode::Prioritized => {
                    let target = rng.random::<f64>() * total;
                    self.tree.find(target).min(self.size - 1)
                }
            };
            let stored = self.slots[slot].as_ref().expect("sampled empty slot");
            let prob = match self.cfg.mode {
                SamplingMode::Uniform => 1.0 / n,
                SamplingMode::Prioritized => self.tree.get(slot) / total,
            };
            let weight = (n * prob).powf(-beta);
            w_max = w_max.max(weight);
            out.push(Sampled {
                seq: stored.seq.clone(),
                weight,
                handle: SeqHandle {
                    seq_no: stored.seq_no,
                },
            });
        }
        if w_max > 0.0 {
            for s in out.iter_mut() {
                s.weight /= w_max;
            }
        }
        Ok(out)
    }

    /// Visit every stored sequence (slot order).
    pub fn for_each_sequence(&self, mut f: impl FnMut(&SortSequence)) {
        for slot in self.slots.iter().flatten() {
            f(&slot.seq);
        }
    }

    /// Set the referenced sequence's priority from its TD error magnitude.
    /// Updates against evicted sequences are dropped and counted.
    pub fn update_priority(&mut self, handle: SeqHandle, td_error_abs: f64) {
        let slot = (handle.seq_no % self.cfg.capacity as u64) as usize;
        match &self.slots[slot] {
            Some(s) if s.seq_no == handle.seq_no => {
                let p = td_error_abs.abs() + self.cfg.priority_epsilon;
                self.max_priority = self.max_priority.max(p);
                let key = self.priority_key(p);
                self.tree.set(slot, key);
            }
            _ => {
                self.stale_updates += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn seq(n: usize, reward: f64) -> SortSequence {
        SortSequence {
            xs_before: vec![FeatureVector([0.0; 6]); n],
            actions: vec![0; n],
            reward,
            xs_after: vec![],
        }
    }

    fn tiny_cfg(capacity: usize, warmup: usize, alpha: f64) -> ReplayConfig {
        ReplayConfig {
            capacity,
            warmup,
            alpha,
            priority_epsilon: 1e-6,
            mode: SamplingMode::Prioritized,
        }
    }

    #[test]
    fn first_push_gets_initial_max_priority() {
        let mut buf = ReplayBuffer::new(tiny_cfg(8, 1, 1.0));
        buf.push(seq(2, 0.0)).unwrap();
        assert_eq!(buf.len(), 1);
        assert_eq!(buf.max_priority(), 1.0);
        assert!((buf.tree.get(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eviction_is_fifo_and_capacity_bounded() {
        let mut buf = ReplayBuffer::new(tiny_cfg(4, 1, 1.0));
        let h0 = buf.push(seq(1, 0.0)).unwrap();
        for k in 1..5 {
            buf.push(seq(1, k as f64)).unwrap();
        }
        assert_eq!(buf.len(), 4);
        // slot 0 now holds sequence 4; the original handle is stale
        buf.update_priority(h0, 9.0);
        assert_eq!(buf.stale_updates(), 1);
        let slot0 = buf.slots[0].as_ref().unwrap();
        assert_eq!(slot0.seq.reward, 4.0);
    }

    #[test]
    fn new_items_inherit_current_max_priority() {
        let mut buf = ReplayBuffer::new(tiny_cfg(8, 1, 1.0));
        let h = buf.push(seq(1, 0.0)).unwrap();
        buf.update_priority(h, 5.0);
        buf.push(seq(1, 1.0)).unwrap();
        let p1 = buf.tree.get(1);
        assert!((p1 - (5.0 + 1e-6)).abs() < 1e-9, "got {p1}");
    }

    #[test]
    fn warmup_gate() {
        let mut buf = ReplayBuffer::new(tiny_cfg(64, 3, 1.0));
        assert!(!buf.is_ready());
        buf.push(seq(1, 0.0)).unwrap();
        buf.push(seq(1, 0.0)).unwrap();
        assert!(!buf.is_ready());
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert!(matches!(
            buf.sample(1, 0.4, &mut rng),
            Err(ReplayError::NotReady { .. })
        ));
        buf.push(seq(1, 0.0)).unwrap();
        assert!(buf.is_ready());
        assert!(buf.sample(2, 0.4, &mut rng).is_ok());
    }

    #[test]
    fn malformed_sequences_are_rejected() {
        let mut buf = ReplayBuffer::new(tiny_cfg(8, 1, 1.0));
        let empty = SortSequence {
            xs_before: vec![],
            actions: vec![],
            reward: 0.0,
            xs_after: vec![],
        };
        assert!(buf.push(empty).is_err());
        let bad_action = SortSequence {
            xs_before: vec![FeatureVector([0.0; 6]); 2],
            actions: vec![0, 1], // second action must be 0: one element left
            reward: 0.0,
            xs_after: vec![],
        };
        assert!(buf.push(bad_action).is_err());
        let wrong_len = SortSequence {
            xs_before: vec![FeatureVector([0.0; 6]); 2],
            actions: vec![0],
            reward: 0.0,
            xs_after: vec![],
        };
        assert!(buf.push(wrong_len).is_err());
    }

    #[test]
    fn zero_td_error_keeps_priority_positive() {
        let mut buf = ReplayBuffer::new(tiny_cfg(8, 1, 1.0));
        let h = buf.push(seq(1, 0.0)).unwrap();
        buf.update_priority(h, 0.0);
        assert!(buf.tree.get(0) > 0.0);
        assert!((buf.tree.get(0) - 1e-6).abs() < 1e-15);
    }

    // Two items with priorities 3:1 should be drawn in that ratio.
    #[test]
    fn sampling_follows_priority_ratio() {
        let mut buf = ReplayBuffer::new(tiny_cfg(8, 2, 1.0));
        let h0 = buf.push(seq(1, 0.0)).unwrap();
        let h1 = buf.push(seq(1, 1.0)).unwrap();
        buf.update_priority(h0, 3.0);
        buf.update_priority(h1, 1.0);
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let mut counts = [0u64; 2];
        let draws = 100_000;
        for _ in 0..draws {
            let s = buf.sample(1, 0.0, &mut rng).unwrap();
            counts[s[0].seq.reward as usize] += 1;
        }
        let ratio = counts[0] as f64 / counts[1] as f64;
        assert!(
            (ratio - 3.0).abs() / 3.0 < 0.05,
            "ratio {ratio} outside 5% of 3.0"
        );
    }

    #[test]
    fn alpha_zero_is_uniform_and_weights_one() {
        let mut buf = ReplayBuffer::new(tiny_cfg(8, 4, 0.0));
        for k in 0..4 {
            let h = buf.push(seq(1, k as f64)).unwrap();
            buf.update_priority(h, (k + 1) as f64 * 10.0);
        }
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let mut counts = [0u64; 4];
        for _ in 0..40_000 {
            let s = buf.sample(1, 0.7, &mut rng).unwrap();
            assert_eq!(s[0].weight, 1.0);
            counts[s[0].seq.reward as usize] += 1;
        }
        for &c in &counts {
            let p = c as f64 / 40_000.0;
            assert!((p - 0.25).abs() < 0.02, "uniform draw probability {p}");
        }
    }

    #[test]
    fn beta_one_uniform_priorities_gives_unit_weights() {
        let mut buf = ReplayBuffer::new(tiny_cfg(8, 3, 0.6));
        for k in 0..3 {
            let h = buf.push(seq(1, k as f64)).unwrap();
            buf.update_priority(h, 2.5);
        }
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        let batch = buf.sample(3, 1.0, &mut rng).unwrap();
        for s in batch {
            assert!((s.weight - 1.0).abs() < 1e-12);
        }
    }

    // Priority updates shift the empirical distribution.
    #[test]
    fn update_shifts_distribution() {
        let mut buf = ReplayBuffer::new(tiny_cfg(8, 2, 1.0));
        let h0 = buf.push(seq(1, 0.0)).unwrap();
        let h1 = buf.push(seq(1, 1.0)).unwrap();
        buf.update_priority(h0, 1.0);
        buf.update_priority(h1, 1.0);
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let count_item0 = |buf: &ReplayBuffer, rng: &mut ChaCha12Rng| {
            let mut c = 0u64;
            for _ in 0..20_000 {
                let s = buf.sample(1, 0.0, rng).unwrap();
                if s[0].seq.reward == 0.0 {
                    c += 1;
                }
            }
            c
        };
        let before = count_item0(&buf, &mut rng);
        buf.update_priority(h0, 9.0);
        let after = count_item0(&buf, &mut rng);
        assert!(
            after as f64 > before as f64 * 1.5,
            "before {before} after {after}"
        );
    }
}
