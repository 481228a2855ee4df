//! Fully connected stacks with ReLU activations and exact reverse-mode
//! gradients.

use serde::{Deserialize, Serialize};

use super::math::Mat;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseParams {
    pub w: Mat,
    pub b: Vec<f64>,
}

impl DenseParams {
    pub fn zeros(out_dim: usize, in_dim: usize) -> Self {
        DenseParams {
            w: Mat::zeros(out_dim, in_dim),
            b: vec![0.0; out_dim],
        }
    }
}

/// A stack of dense layers. Hidden layers always use ReLU; the output layer
/// uses ReLU iff `relu_output` is set (the list encoders want it, the
/// Q-network head is linear).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub layers: Vec<DenseParams>,
    pub relu_output: bool,
}

/// Per-layer inputs and pre-activations recorded by a forward pass.
#[derive(Debug, Clone)]
pub struct MlpTape {
    inputs: Vec<Vec<f64>>,
    preacts: Vec<Vec<f64>>,
}

impl MlpParams {
    pub fn zeros(dims: &[usize], relu_output: bool) -> Self {
        assert!(dims.len() >= 2, "an mlp needs at least one layer");
        let layers = dims
            .windows(2)
            .map(|w| DenseParams::zeros(w[1], w[0]))
            .collect();
        MlpParams {
            layers,
            relu_output,
        }
    }

    pub fn in_dim(&self) -> usize {
        self.layers[0].w.cols
    }

    pub fn out_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].w.rows
    }

    fn relu_at(&self, layer: usize) -> bool {
        layer + 1 < self.layers.len() || self.relu_output
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let mut cur = x.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            let mut out = layer.b.clone();
            let mut z = vec![0.0; layer.w.rows];
            layer.w.matvec(&cur, &mut z);
            for (o, zi) in out.iter_mut().zip(z.iter()) {
                *o += zi;
            }
            if self.relu_at(l) {
                for o in out.iter_mut() {
                    if *o < 0.0 {
                        *o = 0.0;
                    }
                }
            }
            cur = out;
        }
        cur
    }

    pub fn forward_tape(&self, x: &[f64]) -> (Vec<f64>, MlpTape) {
        let mut tape = MlpTape {
            inputs: Vec::with_capacity(self.layers.len()),
            preacts: Vec::with_capacity(self.layers.len()),
        };
        let mut cur = x.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            tape.inputs.push(cur.clone());
            let mut pre = layer.b.clone();
            let mut z = vec![0.0; layer.w.rows];
            layer.w.matvec(&cur, &mut z);
            for (p, zi) in pre.iter_mut().zip(z.iter()) {
                *p += zi;
            }
            tape.preacts.push(pre.clone());
            if self.relu_at(l) {
                for p in pre.iter_mut() {
                    if *p < 0.0 {
                        *p = 0.0;
                    }
                }
            }
            cur = pre;
        }
        (cur, tape)
    }

    /// Backpropagate `dout` through the recorded pass, accumulating parameter
    /// gradients into `grads` and returning the gradient w.r.t. the input.
    pub fn backward(&self, tape: &MlpTape, dout: &[f64], grads: &mut MlpParams) -> Vec<f64> {
        let mut dy = dout.to_vec();
        for l in (0..self.layers.len()).rev() {
            let layer = &self.layers[l];
            let glayer = &mut grads.layers[l];
            if self.relu_at(l) {
                for (d, pre) in dy.iter_mut().zip(tape.preacts[l].iter()) {
                    if *pre <= 0.0 {
                        *d = 0.0;
                    }
                }
            }
            glayer.w.outer_acc(&dy, &tape.inputs[l]);
            for (gb, d) in glayer.b.iter_mut().zip(dy.iter()) {
                *gb += d;
            }
            let mut dx = vec![0.0; layer.w.cols];
            layer.w.matvec_t_acc(&dy, &mut dx);
            dy = dx;
        }
        dy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_network_outputs_zero() {
        let mlp = MlpParams::zeros(&[3, 4, 1], false);
        let out = mlp.forward(&[1.0, -2.0, 3.0]);
        assert_eq!(out, vec![0.0]);
    }

    #[test]
    fn bias_passes_through_zero_weights() {
        let mut mlp = MlpParams::zeros(&[3, 4, 1], false);
        let last = mlp.layers.len() - 1;
        mlp.layers[last].b[0] = 0.75;
        let out = mlp.forward(&[5.0, 6.0, 7.0]);
        assert_eq!(out, vec![0.75]);
    }

    #[test]
    fn tape_and_plain_forward_agree() {
        let mut mlp = MlpParams::zeros(&[2, 3, 2], true);
        let mut v = 0.1;
        for layer in mlp.layers.iter_mut() {
            for w in layer.w.data.iter_mut() {
                *w = v;
                v += 0.07;
            }
            for b in layer.b.iter_mut() {
                *b = -v;
                v += 0.03;
            }
        }
        let x = [0.3, -1.2];
        let (a, _) = mlp.forward_tape(&x);
        let b = mlp.forward(&x);
        assert_eq!(a, b);
    }
}
