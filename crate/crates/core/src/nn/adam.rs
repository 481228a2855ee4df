//! Adam optimizer over the policy parameter set.

use thiserror::Error;

use super::params::PolicyParams;

#[derive(Debug, Error)]
pub enum OptimError {
    #[error("non-finite gradient encountered at step {step}")]
    NonFiniteGradient { step: u64 },
}

#[derive(Debug, Clone)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Optional global-norm gradient clip; `None` disables clipping.
    pub max_grad_norm: Option<f64>,
}

impl AdamConfig {
    pub fn with_lr(lr: f64) -> Self {
        AdamConfig {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            max_grad_norm: None,
        }
    }
}

#[derive(Debug)]
pub struct Adam {
    cfg: AdamConfig,
    t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(cfg: AdamConfig, shape_of: &PolicyParams) -> Self {
        let shapes: Vec<usize> = shape_of.tensors().iter().map(|t| t.len()).collect();
        Adam {
            cfg,
            t: 0,
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    pub fn step(
        &mut self,
        params: &mut PolicyParams,
        grads: &PolicyParams,
    ) -> Result<(), OptimError> {
        let gts = grads.tensors();
        if gts.iter().any(|t| t.iter().any(|g| !g.is_finite())) {
            return Err(OptimError::NonFiniteGradient { step: self.t });
        }
        let clip_scale = match self.cfg.max_grad_norm {
            Some(max) if max > 0.0 => {
                let norm: f64 = gts
                    .iter()
                    .map(|t| t.iter().map(|g| g * g).sum::<f64>())
                    .sum::<f64>()
                    .sqrt();
                if norm > max {
                    max / norm
                } else {
                    1.0
                }
            }
            _ => 1.0,
        };
        self.t += 1;
        let bc1 = 1.0 - self.cfg.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.cfg.beta2.powi(self.t as i32);
        for ((pt, gt), (mt, vt)) in params
            .tensors_mut()
            .into_iter()
            .zip(gts.into_iter())
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            for i in 0..pt.len() {
                let g = gt[i] * clip_scale;
                mt[i] = self.cfg.beta1 * mt[i] + (1.0 - self.cfg.beta1) * g;
                vt[i] = self.cfg.beta2 * vt[i] + (1.0 - self.cfg.beta2) * g * g;
                let m_hat = mt[i] / bc1;
                let v_hat = vt[i] / bc2;
                pt[i] -= self.cfg.lr * m_hat / (v_hat.sqrt() + self.cfg.epsilon);
            }
        }
        Ok(())
    }
}
