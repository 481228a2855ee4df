//! Learner side: replays stored sort sequences through online and target
//! networks, accumulates the exact gradient of the sequence loss, and
//! applies Adam updates with periodic target refixation.
//!
//! Per sequence, the update follows the actor's selection order. At each
//! intermediate step the target output state leads the online one by the
//! step's action, the bootstrap maximizes the target Q over the input list
//! before that action's element is removed, and the squared TD error
//! accumulates gradient. The final step adds the terminal reward and
//! bootstraps from the successor list with a freshly encoded target input
//! state and a zero target output state. The accumulated gradient is
//! normalized by the sequence length.

use rand_chacha::ChaCha12Rng;
use thiserror::Error;

use crate::nn::{
    q_forward, q_forward_tape, Adam, AdamConfig, EncoderTape, OptimError, ParamSet, PolicyArch,
    PolicyParams,
};
use crate::replay::{ReplayBuffer, ReplayError, SortSequence};
use crate::sortmdp::{FeatureStats, FEATURE_DIM};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetMode {
    Vanilla,
    Double,
}

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error(transparent)]
    Optim(#[from] OptimError),
}

/// Bootstrap value over a candidate set: the target network evaluates every
/// candidate at the target state; in double mode the online network selects
/// the action and the target network scores it.
pub fn dqn_target(
    s_target: &[f64],
    s_out_target: &[f64],
    candidates: &[&[f64]],
    online_q: &crate::nn::MlpParams,
    target_q: &crate::nn::MlpParams,
    mode: TargetMode,
) -> f64 {
    assert!(
        !candidates.is_empty(),
        "bootstrap over an empty candidate set"
    );
    match mode {
        TargetMode::Vanilla => candidates
            .iter()
            .map(|x| q_forward(target_q, s_target, s_out_target, x))
            .fold(f64::NEG_INFINITY, f64::max),
        TargetMode::Double => {
            let mut best = 0usize;
            let mut best_q = f64::NEG_INFINITY;
            for (j, x) in candidates.iter().enumerate() {
                let q = q_forward(online_q, s_target, s_out_target, x);
                if q > best_q {
                    best_q = q;
                    best = j;
                }
            }
            q_forward(target_q, s_target, s_out_target, candidates[best])
        }
    }
}

/// Per-sequence gradient output.
#[derive(Debug, Clone)]
pub struct SeqGradReport {
    /// TD error per step, terminal last.
    pub td_errors: Vec<f64>,
    /// Length-normalized sum of squared-error halves (unweighted).
    pub loss: f64,
}

/// Accumulate `scale / N` times the gradient of the sequence loss into
/// `grads`. `scale` carries the importance weight and any batch averaging.
#[allow(clippy::too_many_arguments)]
pub fn sequence_grad(
    online: &PolicyParams,
    target: &PolicyParams,
    xs_before: &[[f64; FEATURE_DIM]],
    actions: &[usize],
    reward: f64,
    xs_after: &[[f64; FEATURE_DIM]],
    gamma: f64,
    mode: TargetMode,
    scale: f64,
    grads: &mut PolicyParams,
) -> SeqGradReport {
    let n = actions.len();
    assert!(n >= 1 && n == xs_before.len());
    let enc_dim = online.input_encoder.out_dim();
    let step_scale = scale / n as f64;

    // Online input encoding with tape; target input encoding plain.
    let mut tape_in = EncoderTape::default();
    let mut in_state = online.input_encoder.zero_state();
    let mut s_in = vec![0.0; enc_dim];
    for x in xs_before {
        s_in = online
            .input_encoder
            .step_tape(x, &mut in_state, &mut tape_in);
    }
    let xs_before_vecs: Vec<Vec<f64>> = xs_before.iter().map(|x| x.to_vec()).collect();
    let s_in_target = target.input_encoder.encode_list(&xs_before_vecs);

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut tape_out = EncoderTape::default();
    let mut out_state = online.output_encoder.zero_state();
    let mut s_out = vec![0.0; enc_dim];
    let mut target_out_state = target.output_encoder.zero_state();

    let mut ds_in_acc = vec![0.0; enc_dim];
    // gradient w.r.t. the online output state produced by encoder step j
    let mut ds_out_inject: Vec<Option<Vec<f64>>> = vec![None; n.saturating_sub(1)];
    let mut td_errors = Vec::with_capacity(n);
    let mut loss = 0.0;

    let backprop_q = |q_tape: &crate::nn::MlpTape,
                          delta: f64,
                          grads: &mut PolicyParams,
                          ds_in_acc: &mut Vec<f64>|
     -> Vec<f64> {
        let dout = vec![step_scale * (-delta)];
        let dinput = online.q_net.backward(q_tape, &dout, &mut grads.q_net);
        for (acc, d) in ds_in_acc.iter_mut().zip(dinput[..enc_dim].iter()) {
            *acc += d;
        }
        dinput[enc_dim..2 * enc_dim].to_vec()
    };

    for (k, &a) in actions.iter().take(n - 1).enumerate() {
        debug_assert!(a < remaining.len());
        let chosen = remaining[a];
        let x_a = &xs_before[chosen];
        // target output state leads by this action
        let s_out_target = target.output_encoder.step(x_a, &mut target_out_state);
        let candidates: Vec<&[f64]> = remaining
            .iter()
            .map(|&i| xs_before[i].as_slice())
            .collect();
        let bootstrap = dqn_target(
            &s_in_target,
            &s_out_target,
            &candidates,
            &online.q_net,
            &target.q_net,
            mode,
        );
        let y = gamma * bootstrap;
        let (q, q_tape) = q_forward_tape(&online.q_net, &s_in, &s_out, x_a);
        let delta = y - q;
        td_errors.push(delta);
        loss += 0.5 * delta * delta;
        let ds_out = backprop_q(&q_tape, delta, grads, &mut ds_in_acc);
        if k > 0 {
            // s_out here was produced by encoder step k-1
            merge_inject(&mut ds_out_inject[k - 1], ds_out);
        }
        s_out = online
            .output_encoder
            .step_tape(x_a, &mut out_state, &mut tape_out);
        remaining.remove(a);
    }

    // Terminal step: reward plus bootstrap over the successor list with a
    // recomputed target input state and zero target output state.
    debug_assert_eq!(remaining.len(), 1);
    let last_action = actions[n - 1];
    debug_assert_eq!(last_action, 0, "terminal action must pick the last element");
    let x_last = &xs_before[remaining[last_action]];
    let bootstrap = if xs_after.is_empty() {
        0.0
    } else {
        let xs_after_vecs: Vec<Vec<f64>> = xs_after.iter().map(|x| x.to_vec()).collect();
        let s_in_next = target.input_encoder.encode_list(&xs_after_vecs);
        let zero_out = vec![0.0; enc_dim];
        let candidates: Vec<&[f64]> = xs_after.iter().map(|x| x.as_slice()).collect();
        dqn_target(
            &s_in_next,
            &zero_out,
            &candidates,
            &online.q_net,
            &target.q_net,
            mode,
        )
    };
    let y = reward + gamma * bootstrap;
    let (q, q_tape) = q_forward_tape(&online.q_net, &s_in, &s_out, x_last);
    let delta = y - q;
    td_errors.push(delta);
    loss += 0.5 * delta * delta;
    let ds_out = backprop_q(&q_tape, delta, grads, &mut ds_in_acc);
    if n > 1 {
        merge_inject(&mut ds_out_inject[n - 2], ds_out);
    }

    // Backpropagation through time over both encoders.
    if !tape_out.is_empty() {
        online
            .output_encoder
            .backward_tape(&tape_out, &ds_out_inject, &mut grads.output_encoder);
    }
    let mut ds_in_inject: Vec<Option<Vec<f64>>> = vec![None; n];
    ds_in_inject[n - 1] = Some(ds_in_acc);
    online
        .input_encoder
        .backward_tape(&tape_in, &ds_in_inject, &mut grads.input_encoder);

    SeqGradReport {
        td_errors,
        loss: loss / n as f64,
    }
}

fn merge_inject(slot: &mut Option<Vec<f64>>, ds: Vec<f64>) {
    match slot {
        Some(acc) => {
            for (a, d) in acc.iter_mut().zip(ds.iter()) {
                *a += d;
            }
        }
        None => *slot = Some(ds),
    }
}

#[derive(Debug, Clone)]
pub struct LearnerConfig {
    pub gamma: f64,
    pub batch_size: usize,
    pub lr: f64,
    pub target_period: u64,
    pub double_dqn: bool,
    pub beta0: f64,
    pub beta_horizon_steps: u64,
    pub max_grad_norm: Option<f64>,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            gamma: 0.99,
            batch_size: 32,
            lr: 1e-4,
            target_period: 2500,
            double_dqn: true,
            beta0: 0.4,
            beta_horizon_steps: 100_000,
            max_grad_norm: None,
        }
    }
}

/// Log line payload for one learner step.
#[derive(Debug, Clone, Copy)]
pub struct LearnerStats {
    pub step: u64,
    pub loss: f64,
    pub mean_abs_td: f64,
    pub buffer_len: usize,
    pub version: u64,
}

pub struct Learner {
    pub arch: PolicyArch,
    pub online: ParamSet,
    target: PolicyParams,
    opt: Adam,
    cfg: LearnerConfig,
    stats: FeatureStats,
    step: u64,
}

impl Learner {
    pub fn new(arch: PolicyArch, initial: PolicyParams, cfg: LearnerConfig, stats: FeatureStats) -> Self {
        let mut adam_cfg = AdamConfig::with_lr(cfg.lr);
        adam_cfg.max_grad_norm = cfg.max_grad_norm;
        let opt = Adam::new(adam_cfg, &initial);
        Learner {
            arch,
            target: initial.clone(),
            online: ParamSet::new(initial),
            opt,
            cfg,
            stats,
            step: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn target_weights(&self) -> &PolicyParams {
        &self.target
    }

    pub fn feature_stats(&self) -> &FeatureStats {
        &self.stats
    }

    pub fn beta(&self) -> f64 {
        if self.cfg.beta_horizon_steps == 0 {
            return 1.0;
        }
        let frac = (self.step as f64 / self.cfg.beta_horizon_steps as f64).min(1.0);
        self.cfg.beta0 + (1.0 - self.cfg.beta0) * frac
    }

    fn normalize_seq(&self, seq: &SortSequence) -> (Vec<[f64; FEATURE_DIM]>, Vec<[f64; FEATURE_DIM]>) {
        let before = seq.xs_before.iter().map(|x| self.stats.normalize(x)).collect();
        let after = seq.xs_after.iter().map(|x| self.stats.normalize(x)).collect();
        (before, after)
    }

    /// One training step: sample a batch, accumulate the batch-mean gradient,
    /// push priorities back, and apply Adam. Refixates the target copy every
    /// `target_period` steps.
    pub fn step_batch(
        &mut self,
        buffer: &mut ReplayBuffer,
        rng: &mut ChaCha12Rng,
    ) -> Result<LearnerStats, LearnerError> {
        let batch = buffer.sample(self.cfg.batch_size, self.beta(), rng)?;
        let (mut stats, updates) = self.step_sampled(batch)?;
        for (handle, prio) in updates {
            buffer.update_priority(handle, prio);
        }
        stats.buffer_len = buffer.len();
        Ok(stats)
    }

    /// Gradient/optimizer work for an already-sampled batch. Returns the
    /// per-sequence mean |TD| values to feed back as priorities; the caller
    /// owns the buffer and applies them (threaded mode holds the lock only
    /// around sampling and the update).
    pub fn step_sampled(
        &mut self,
        batch: Vec<crate::replay::Sampled>,
    ) -> Result<(LearnerStats, Vec<(crate::replay::SeqHandle, f64)>), LearnerError> {
        assert!(!batch.is_empty());
        let mode = if self.cfg.double_dqn {
            TargetMode::Double
        } else {
            TargetMode::Vanilla
        };
        let mut grads = self.arch.zeros();
        let inv_batch = 1.0 / batch.len() as f64;
        let mut loss_sum = 0.0;
        let mut abs_td_sum = 0.0;
        let mut td_count = 0usize;
        let mut updates = Vec::with_capacity(batch.len());
        for item in &batch {
            let (before, after) = self.normalize_seq(&item.seq);
            let report = sequence_grad(
                &self.online.weights,
                &self.target,
                &before,
                &item.seq.actions,
                item.seq.reward,
                &after,
                self.cfg.gamma,
                mode,
                item.weight * inv_batch,
                &mut grads,
            );
            loss_sum += report.loss;
            let mean_abs = report.td_errors.iter().map(|d| d.abs()).sum::<f64>()
                / report.td_errors.len() as f64;
            abs_td_sum += mean_abs * report.td_errors.len() as f64;
            td_count += report.td_errors.len();
            updates.push((item.handle, mean_abs));
        }
        self.opt.step(&mut self.online.weights, &grads)?;
        self.step += 1;
        self.online.version += 1;
        if self.step % self.cfg.target_period == 0 {
            self.target = self.online.weights.clone();
        }
        Ok((
            LearnerStats {
                step: self.step,
                loss: loss_sum * inv_batch,
                mean_abs_td: abs_td_sum / td_count.max(1) as f64,
                buffer_len: 0,
                version: self.online.version,
            },
            updates,
        ))
    }
}
