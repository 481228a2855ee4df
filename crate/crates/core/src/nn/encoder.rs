//! List encoder: a dense front-end followed by a stack of GRUs. A list is
//! encoded by feeding its elements through the stack in order, starting from
//! the zero state; the encoding is the top GRU state after the last element.

use serde::{Deserialize, Serialize};

use super::gru::{GruCache, GruParams};
use super::math::add_assign;
use super::mlp::{MlpParams, MlpTape};

/// Hidden states of the GRU stack, one vector per layer.
pub type RecState = Vec<Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderParams {
    pub mlp: MlpParams,
    pub grus: Vec<GruParams>,
}

#[derive(Debug, Clone)]
struct EncoderStepCache {
    mlp: MlpTape,
    grus: Vec<GruCache>,
}

/// Recorded forward steps of one list pass, consumed by [`EncoderParams::backward_tape`].
#[derive(Debug, Clone, Default)]
pub struct EncoderTape {
    steps: Vec<EncoderStepCache>,
}

impl EncoderTape {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl EncoderParams {
    pub fn zeros(dense: &[usize], gru: &[usize]) -> Self {
        assert!(!gru.is_empty(), "encoder needs at least one recurrent layer");
        let mlp = MlpParams::zeros(dense, true);
        let mut grus = Vec::with_capacity(gru.len());
        let mut in_dim = *dense.last().unwrap();
        for &h in gru {
            grus.push(GruParams::zeros(h, in_dim));
            in_dim = h;
        }
        EncoderParams { mlp, grus }
    }

    /// Dimension of the produced encoding (top GRU state size).
    pub fn out_dim(&self) -> usize {
        self.grus[self.grus.len() - 1].hidden_dim()
    }

    pub fn in_dim(&self) -> usize {
        self.mlp.in_dim()
    }

    pub fn zero_state(&self) -> RecState {
        self.grus.iter().map(|g| vec![0.0; g.hidden_dim()]).collect()
    }

    /// Feed one element, updating `state` in place; returns the new top state.
    pub fn step(&self, x: &[f64], state: &mut RecState) -> Vec<f64> {
        let mut cur = self.mlp.forward(x);
        for (layer, h) in self.grus.iter().zip(state.iter_mut()) {
            let next = layer.step(&cur, h);
            *h = next.clone();
            cur = next;
        }
        cur
    }

    pub fn step_tape(&self, x: &[f64], state: &mut RecState, tape: &mut EncoderTape) -> Vec<f64> {
        let (mut cur, mlp_tape) = self.mlp.forward_tape(x);
        let mut caches = Vec::with_capacity(self.grus.len());
        for (layer, h) in self.grus.iter().zip(state.iter_mut()) {
            let (next, cache) = layer.step_tape(&cur, h);
            caches.push(cache);
            *h = next.clone();
            cur = next;
        }
        tape.steps.push(EncoderStepCache {
            mlp: mlp_tape,
            grus: caches,
        });
        cur
    }

    /// Encode a whole list from the zero state. An empty list encodes to the
    /// zero vector.
    pub fn encode_list(&self, xs: &[Vec<f64>]) -> Vec<f64> {
        let mut state = self.zero_state();
        let mut out = vec![0.0; self.out_dim()];
        for x in xs {
            out = self.step(x, &mut state);
        }
        out
    }

    /// Backpropagation through time over a recorded pass.
    ///
    /// `d_top[k]`, when present, is the loss gradient w.r.t. the top state
    /// emitted by step `k`. Parameter gradients accumulate into `grads`.
    pub fn backward_tape(
        &self,
        tape: &EncoderTape,
        d_top: &[Option<Vec<f64>>],
        grads: &mut EncoderParams,
    ) {
        assert_eq!(d_top.len(), tape.steps.len());
        let layers = self.grus.len();
        let mut carry: RecState = self.zero_state();
        for (step, inject) in tape.steps.iter().zip(d_top.iter()).rev() {
            // gradient flowing into the top layer's new state
            let top = layers - 1;
            let mut dh_next = carry[top].clone();
            if let Some(d) = inject {
                add_assign(&mut dh_next, d);
            }
            let mut d_from_above = dh_next;
            for l in (0..layers).rev() {
                let mut dh = d_from_above;
                if l < top {
                    add_assign(&mut dh, &carry[l]);
                }
                let (dx, dh_prev) = self.grus[l].backward(&step.grus[l], &dh, &mut grads.grus[l]);
                carry[l] = dh_prev;
                d_from_above = dx;
            }
            self.mlp.backward(&step.mlp, &d_from_above, &mut grads.mlp);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    use crate::nn::init::init_encoder;

    #[test]
    fn zero_weights_encode_to_zero() {
        let enc = EncoderParams::zeros(&[6, 8], &[4, 4]);
        let xs = vec![vec![1.0; 6], vec![-3.0; 6]];
        let s = enc.encode_list(&xs);
        assert_eq!(s, vec![0.0; 4]);
    }

    #[test]
    fn empty_list_encodes_to_zero() {
        let enc = EncoderParams::zeros(&[6, 8], &[4]);
        assert_eq!(enc.encode_list(&[]), vec![0.0; 4]);
    }

    // Order sensitivity: random parameters should encode [x1, x2] and
    // [x2, x1] differently.
    #[test]
    fn encoding_is_order_sensitive() {
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let enc = init_encoder(&[6, 8], &[4, 4], &mut rng);
        let x1: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x2: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let a = enc.encode_list(&[x1.clone(), x2.clone()]);
        let b = enc.encode_list(&[x2, x1]);
        let diff: f64 = a.iter().zip(b.iter()).map(|(p, q)| (p - q).abs()).sum();
        assert!(diff > 1e-6, "permuted inputs encoded identically");
    }

    #[test]
    fn step_and_tape_step_agree() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let enc = init_encoder(&[3, 5], &[4, 3], &mut rng);
        let xs: Vec<Vec<f64>> = (0..4)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let mut s1 = enc.zero_state();
        let mut s2 = enc.zero_state();
        let mut tape = EncoderTape::default();
        for x in &xs {
            let a = enc.step(x, &mut s1);
            let b = enc.step_tape(x, &mut s2, &mut tape);
            assert_eq!(a, b);
        }
        assert_eq!(tape.len(), 4);
    }
}
