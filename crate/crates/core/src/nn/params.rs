//! Parameter containers for the full policy: input-list encoder,
//! output-list encoder, and Q-network, plus the architecture description
//! they are built from.

use serde::{Deserialize, Serialize};

use super::encoder::EncoderParams;
use super::mlp::MlpParams;

/// Layer sizes for the two encoders and the Q-network head.
///
/// `q_hidden` lists only the hidden layers; the Q input dimension is derived
/// as `feature_dim + 2 * encoding_dim` and the output is a scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyArch {
    pub encoder_dense: Vec<usize>,
    pub encoder_gru: Vec<usize>,
    pub q_hidden: Vec<usize>,
}

impl PolicyArch {
    /// Sizes used for full-scale runs: 6x256x128 dense front-end, GRU stack
    /// 64x32x32, Q-network (6+32+32)x512x256x128x64x1.
    pub fn full(feature_dim: usize) -> Self {
        PolicyArch {
            encoder_dense: vec![feature_dim, 256, 128],
            encoder_gru: vec![64, 32, 32],
            q_hidden: vec![512, 256, 128, 64],
        }
    }

    pub fn feature_dim(&self) -> usize {
        self.encoder_dense[0]
    }

    pub fn encoding_dim(&self) -> usize {
        *self.encoder_gru.last().expect("empty gru stack")
    }

    pub fn q_dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.q_hidden.len() + 2);
        dims.push(self.feature_dim() + 2 * self.encoding_dim());
        dims.extend_from_slice(&self.q_hidden);
        dims.push(1);
        dims
    }

    pub fn zeros(&self) -> PolicyParams {
        PolicyParams {
            input_encoder: EncoderParams::zeros(&self.encoder_dense, &self.encoder_gru),
            output_encoder: EncoderParams::zeros(&self.encoder_dense, &self.encoder_gru),
            q_net: MlpParams::zeros(&self.q_dims(), false),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.encoder_dense.len() < 2 {
            return Err("encoder_dense needs at least input and one layer".into());
        }
        if self.encoder_gru.is_empty() {
            return Err("encoder_gru must not be empty".into());
        }
        if self.encoder_dense.iter().any(|&d| d == 0)
            || self.encoder_gru.iter().any(|&d| d == 0)
            || self.q_hidden.iter().any(|&d| d == 0)
        {
            return Err("layer sizes must be positive".into());
        }
        Ok(())
    }
}

/// The three trainable networks. The same container shape doubles as the
/// gradient accumulator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub input_encoder: EncoderParams,
    pub output_encoder: EncoderParams,
    pub q_net: MlpParams,
}

impl PolicyParams {
    /// Flat views over every parameter tensor, in a fixed canonical order.
    pub fn tensors(&self) -> Vec<&[f64]> {
        let mut out = Vec::new();
        for enc in [&self.input_encoder, &self.output_encoder] {
            for layer in &enc.mlp.layers {
                out.push(layer.w.data.as_slice());
                out.push(layer.b.as_slice());
            }
            for gru in &enc.grus {
                out.push(gru.wz.data.as_slice());
                out.push(gru.uz.data.as_slice());
                out.push(gru.bz.as_slice());
                out.push(gru.wr.data.as_slice());
                out.push(gru.ur.data.as_slice());
                out.push(gru.br.as_slice());
                out.push(gru.wh.data.as_slice());
                out.push(gru.uh.data.as_slice());
                out.push(gru.bh.as_slice());
            }
        }
        for layer in &self.q_net.layers {
            out.push(layer.w.data.as_slice());
            out.push(layer.b.as_slice());
        }
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out: Vec<&mut [f64]> = Vec::new();
        for enc in [&mut self.input_encoder, &mut self.output_encoder] {
            for layer in enc.mlp.layers.iter_mut() {
                out.push(layer.w.data.as_mut_slice());
                out.push(layer.b.as_mut_slice());
            }
            for gru in enc.grus.iter_mut() {
                out.push(gru.wz.data.as_mut_slice());
                out.push(gru.uz.data.as_mut_slice());
                out.push(gru.bz.as_mut_slice());
                out.push(gru.wr.data.as_mut_slice());
                out.push(gru.ur.data.as_mut_slice());
                out.push(gru.br.as_mut_slice());
                out.push(gru.wh.data.as_mut_slice());
                out.push(gru.uh.data.as_mut_slice());
                out.push(gru.bh.as_mut_slice());
            }
        }
        for layer in self.q_net.layers.iter_mut() {
            out.push(layer.w.data.as_mut_slice());
            out.push(layer.b.as_mut_slice());
        }
        out
    }

    pub fn param_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|v| v.is_finite()))
    }

    /// Read/write the parameters as one flat vector (canonical tensor order).
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for t in self.tensors() {
            out.extend_from_slice(t);
        }
        out
    }

    pub fn from_flat(&mut self, flat: &[f64]) {
        let mut off = 0;
        for t in self.tensors_mut() {
            t.copy_from_slice(&flat[off..off + t.len()]);
            off += t.len();
        }
        assert_eq!(off, flat.len(), "flat vector length mismatch");
    }

    pub fn scale(&mut self, factor: f64) {
        for t in self.tensors_mut() {
            for v in t.iter_mut() {
                *v *= factor;
            }
        }
    }
}

/// A version-stamped snapshot of the policy parameters. Snapshots published
/// to actors are immutable; the learner mutates only its own working copy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamSet {
    pub weights: PolicyParams,
    pub version: u64,
}

impl ParamSet {
    pub fn new(weights: PolicyParams) -> Self {
        ParamSet {
            weights,
            version: 0,
        }
    }
}
