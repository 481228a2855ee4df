//! Gated recurrent unit cell with exact backpropagation through time.
//!
//! Gate equations:
//!   z  = σ(Wz x + Uz h + bz)
//!   r  = σ(Wr x + Ur h + br)
//!   ĥ  = tanh(Wh x + Uh (r⊙h) + bh)
//!   h' = (1−z)⊙h + z⊙ĥ

use serde::{Deserialize, Serialize};

use super::math::{sigmoid, Mat};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GruParams {
    pub wz: Mat,
    pub uz: Mat,
    pub bz: Vec<f64>,
    pub wr: Mat,
    pub ur: Mat,
    pub br: Vec<f64>,
    pub wh: Mat,
    pub uh: Mat,
    pub bh: Vec<f64>,
}

/// Intermediate values of one cell step, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct GruCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub rh: Vec<f64>,
    pub cand: Vec<f64>,
}

impl GruParams {
    pub fn zeros(hidden: usize, input: usize) -> Self {
        GruParams {
            wz: Mat::zeros(hidden, input),
            uz: Mat::zeros(hidden, hidden),
            bz: vec![0.0; hidden],
            wr: Mat::zeros(hidden, input),
            ur: Mat::zeros(hidden, hidden),
            br: vec![0.0; hidden],
            wh: Mat::zeros(hidden, input),
            uh: Mat::zeros(hidden, hidden),
            bh: vec![0.0; hidden],
        }
    }

    pub fn hidden_dim(&self) -> usize {
        self.bz.len()
    }

    pub fn input_dim(&self) -> usize {
        self.wz.cols
    }

    fn gates(&self, x: &[f64], h: &[f64]) -> GruCache {
        let n = self.hidden_dim();
        let mut az = self.bz.clone();
        let mut ar = self.br.clone();
        let mut tmp = vec![0.0; n];
        self.wz.matvec(x, &mut tmp);
        for (a, t) in az.iter_mut().zip(tmp.iter()) {
            *a += t;
        }
        self.uz.matvec(h, &mut tmp);
        for (a, t) in az.iter_mut().zip(tmp.iter()) {
            *a += t;
        }
        self.wr.matvec(x, &mut tmp);
        for (a, t) in ar.iter_mut().zip(tmp.iter()) {
            *a += t;
        }
        self.ur.matvec(h, &mut tmp);
        for (a, t) in ar.iter_mut().zip(tmp.iter()) {
            *a += t;
        }
        let z: Vec<f64> = az.iter().map(|&a| sigmoid(a)).collect();
        let r: Vec<f64> = ar.iter().map(|&a| sigmoid(a)).collect();
        let rh: Vec<f64> = r.iter().zip(h.iter()).map(|(ri, hi)| ri * hi).collect();
        let mut ac = self.bh.clone();
        self.wh.matvec(x, &mut tmp);
        for (a, t) in ac.iter_mut().zip(tmp.iter()) {
            *a += t;
        }
        self.uh.matvec(&rh, &mut tmp);
        for (a, t) in ac.iter_mut().zip(tmp.iter()) {
            *a += t;
        }
        let cand: Vec<f64> = ac.iter().map(|a| a.tanh()).collect();
        GruCache {
            x: x.to_vec(),
            h_prev: h.to_vec(),
            z,
            r,
            rh,
            cand,
        }
    }

    pub fn step(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        let c = self.gates(x, h);
        next_state(&c)
    }

    pub fn step_tape(&self, x: &[f64], h: &[f64]) -> (Vec<f64>, GruCache) {
        let c = self.gates(x, h);
        let h_next = next_state(&c);
        (h_next, c)
    }

    /// Backward through one step. `dh_next` is the loss gradient w.r.t. the
    /// produced state; returns (dx, dh_prev).
    pub fn backward(
        &self,
        cache: &GruCache,
        dh_next: &[f64],
        grads: &mut GruParams,
    ) -> (Vec<f64>, Vec<f64>) {
        let n = self.hidden_dim();
        let mut dh = vec![0.0; n];
        let mut dac = vec![0.0; n];
        let mut daz = vec![0.0; n];
        for i in 0..n {
            let g = dh_next[i];
            let z = cache.z[i];
            let c = cache.cand[i];
            let h = cache.h_prev[i];
            dh[i] = g * (1.0 - z);
            dac[i] = g * z * (1.0 - c * c);
            daz[i] = g * (c - h) * z * (1.0 - z);
        }
        // candidate path: Uhᵀ dac splits into r and h contributions
        let mut drh = vec![0.0; n];
        self.uh.matvec_t_acc(&dac, &mut drh);
        let mut dar = vec![0.0; n];
        for i in 0..n {
            let r = cache.r[i];
            dar[i] = drh[i] * cache.h_prev[i] * r * (1.0 - r);
            dh[i] += drh[i] * r;
        }
        grads.wh.outer_acc(&dac, &cache.x);
        grads.uh.outer_acc(&dac, &cache.rh);
        for (g, d) in grads.bh.iter_mut().zip(dac.iter()) {
            *g += d;
        }
        grads.wz.outer_acc(&daz, &cache.x);
        grads.uz.outer_acc(&daz, &cache.h_prev);
        for (g, d) in grads.bz.iter_mut().zip(daz.iter()) {
            *g += d;
        }
        grads.wr.outer_acc(&dar, &cache.x);
        grads.ur.outer_acc(&dar, &cache.h_prev);
        for (g, d) in grads.br.iter_mut().zip(dar.iter()) {
            *g += d;
        }
        self.uz.matvec_t_acc(&daz, &mut dh);
        self.ur.matvec_t_acc(&dar, &mut dh);
        let mut dx = vec![0.0; self.input_dim()];
        self.wz.matvec_t_acc(&daz, &mut dx);
        self.wr.matvec_t_acc(&dar, &mut dx);
        self.wh.matvec_t_acc(&dac, &mut dx);
        (dx, dh)
    }
}

fn next_state(c: &GruCache) -> Vec<f64> {
    c.z.iter()
        .zip(c.cand.iter())
        .zip(c.h_prev.iter())
        .map(|((z, cand), h)| (1.0 - z) * h + z * cand)
        .collect()
}
