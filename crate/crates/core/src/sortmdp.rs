//! The selection-sort decision process: per-flow features, feature
//! standardization, episode mechanics, and the preference-weighted reward.
//!
//! Sorting N flows is factored into N pick-one actions over a shrinking
//! input list; only the final, complete order is handed to the
//! frequency-domain scheduler, so every intermediate step carries zero
//! reward and the per-TTI reward attaches to the last transition.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{DeliveryReport, Direction, Simulator, TrafficGroup};

pub const FEATURE_DIM: usize = 6;

/// The per-flow feature vector fed to the policies and networks:
/// (time since scheduled, traffic type, buffered bits, uplink flag,
/// new-transmission flag, retransmission flag).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub [f64; FEATURE_DIM]);

impl FeatureVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn time_since_scheduled(&self) -> f64 {
        self.0[0]
    }

    pub fn buffer_bits(&self) -> f64 {
        self.0[2]
    }
}

#[derive(Debug, Error)]
pub enum MdpError {
    #[error("action index {action} out of range for input list of length {len}")]
    ActionOutOfRange { action: usize, len: usize },
    #[error("preference vector has {got} entries, expected {expected}")]
    PreferenceDimension { got: usize, expected: usize },
}

/// Saturation bounds applied during feature extraction. Backlogs are capped
/// by `saturation_bits` (which also stands in for the full buffer's
/// infinite queue); `time_cap_ttis` optionally caps the time-since-scheduled
/// component so deep starvation cannot push inputs arbitrarily far outside
/// the distribution the statistics were frozen on (0 disables the cap).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureLimits {
    pub saturation_bits: u64,
    pub time_cap_ttis: u64,
}

impl Default for FeatureLimits {
    fn default() -> Self {
        FeatureLimits {
            saturation_bits: 1_000_000,
            time_cap_ttis: 0,
        }
    }
}

/// Extract the six per-flow features. Full-buffer backlogs are reported as
/// the saturation constant; never-scheduled flows use `now + 1` as their
/// time-since-scheduled sentinel.
pub fn extract_features(sim: &Simulator, id: u32, limits: &FeatureLimits) -> FeatureVector {
    let flow = sim.flow(id);
    let now = sim.now();
    let mut time_since = match flow.tti_last_scheduled {
        Some(t) => (now - t) as f64,
        None => (now + 1) as f64,
    };
    if limits.time_cap_ttis > 0 {
        time_since = time_since.min(limits.time_cap_ttis as f64);
    }
    let buffer_bits = match flow.group {
        TrafficGroup::FullBuffer => limits.saturation_bits as f64,
        TrafficGroup::Voip => flow.queued_bits().min(limits.saturation_bits) as f64,
    };
    FeatureVector([
        time_since,
        flow.group.code(),
        buffer_bits,
        (flow.direction == Direction::Uplink) as u8 as f64,
        flow.is_new_transmission() as u8 as f64,
        flow.is_retransmission as u8 as f64,
    ])
}

/// Streaming mean/variance accumulator for the warm-up feature corpus.
#[derive(Debug, Clone, Default)]
pub struct FeatureAccumulator {
    n: u64,
    mean: [f64; FEATURE_DIM],
    m2: [f64; FEATURE_DIM],
}

impl FeatureAccumulator {
    pub fn add(&mut self, x: &FeatureVector) {
        self.n += 1;
        let n = self.n as f64;
        for i in 0..FEATURE_DIM {
            let delta = x.0[i] - self.mean[i];
            self.mean[i] += delta / n;
            self.m2[i] += delta * (x.0[i] - self.mean[i]);
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// Freeze into usable statistics (population variance). Components with
    /// zero variance get a standard deviation of one so they pass through
    /// shifted rather than exploding.
    pub fn finalize(&self) -> FeatureStats {
        let mut std = [1.0; FEATURE_DIM];
        if self.n > 0 {
            for i in 0..FEATURE_DIM {
                let var = self.m2[i] / self.n as f64;
                let s = var.sqrt();
                std[i] = if s > 0.0 { s } else { 1.0 };
            }
        }
        FeatureStats {
            mean: self.mean,
            std,
        }
    }
}

/// Frozen per-component standardization statistics. Only a finalized
/// accumulator can produce this, so normalization cannot run on unfinished
/// statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: [f64; FEATURE_DIM],
    pub std: [f64; FEATURE_DIM],
}

impl FeatureStats {
    /// Identity statistics: normalization becomes a no-op.
    pub fn identity() -> Self {
        FeatureStats {
            mean: [0.0; FEATURE_DIM],
            std: [1.0; FEATURE_DIM],
        }
    }

    pub fn normalize(&self, x: &FeatureVector) -> [f64; FEATURE_DIM] {
        let mut out = [0.0; FEATURE_DIM];
        for i in 0..FEATURE_DIM {
            out[i] = (x.0[i] - self.mean[i]) / self.std[i];
        }
        out
    }
}

/// One in-progress selection sort over a feature list.
#[derive(Debug, Clone)]
pub struct SortEpisode {
    original: Vec<FeatureVector>,
    /// Indices into `original` still awaiting selection.
    remaining: Vec<usize>,
    /// Indices into `original` in selection order.
    output: Vec<usize>,
}

impl SortEpisode {
    pub fn new(items: Vec<FeatureVector>) -> Self {
        let remaining = (0..items.len()).collect();
        SortEpisode {
            original: items,
            remaining,
            output: Vec::new(),
        }
    }

    pub fn original(&self) -> &[FeatureVector] {
        &self.original
    }

    pub fn remaining(&self) -> &[usize] {
        &self.remaining
    }

    pub fn output(&self) -> &[usize] {
        &self.output
    }

    pub fn step_index(&self) -> usize {
        self.output.len()
    }

    /// Number of admissible actions at the current step.
    pub fn action_space_size(&self) -> usize {
        self.remaining.len()
    }

    pub fn is_complete(&self) -> bool {
        self.remaining.is_empty()
    }

    /// Apply action `a`: move the `a`-th element of the current input list
    /// to the end of the output list. Actions index the *current* input
    /// list, so the valid set at step k is {0, …, N−k−1}.
    pub fn step(&mut self, a: usize) -> Result<(), MdpError> {
        if a >= self.remaining.len() {
            return Err(MdpError::ActionOutOfRange {
                action: a,
                len: self.remaining.len(),
            });
        }
        let idx = self.remaining.remove(a);
        self.output.push(idx);
        Ok(())
    }
}

/// Per-group reward components for one TTI: delivered full-buffer bits
/// (non-negative) and the negated count of VoIP flows in QoS violation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardVector {
    pub fb_bits: f64,
    pub voip_penalty: f64,
}

/// Group weights for scalarizing the reward vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreferenceVector(pub Vec<f64>);

pub const N_GROUPS: usize = 2;

/// Multiplicative normalization bringing both reward components to O(1):
/// full-buffer bits divided by `fb_divisor`, the VoIP penalty multiplied by
/// `voip_factor`. Both fold into the preference vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardNorms {
    pub fb_divisor: f64,
    pub voip_factor: f64,
}

impl Default for RewardNorms {
    fn default() -> Self {
        RewardNorms {
            fb_divisor: 200_000.0,
            voip_factor: 0.01,
        }
    }
}

impl RewardNorms {
    pub fn identity() -> Self {
        RewardNorms {
            fb_divisor: 1.0,
            voip_factor: 1.0,
        }
    }
}

/// Build the reward vector for a transmitted TTI: full-buffer bits delivered
/// this TTI and −1 per VoIP flow whose QoS is violated.
pub fn compute_reward_vector(sim: &Simulator, report: &DeliveryReport) -> RewardVector {
    let fb_bits: u64 = report
        .flows
        .iter()
        .filter(|d| d.group == TrafficGroup::FullBuffer)
        .map(|d| d.bits)
        .sum();
    RewardVector {
        fb_bits: fb_bits as f64,
        voip_penalty: -(sim.qos_violations(report) as f64),
    }
}

/// Scalarize: r = ω · (fb_bits / fb_divisor, voip_penalty · voip_factor).
pub fn scalarize(
    r: &RewardVector,
    omega: &PreferenceVector,
    norms: &RewardNorms,
) -> Result<f64, MdpError> {
    if omega.0.len() != N_GROUPS {
        return Err(MdpError::PreferenceDimension {
            got: omega.0.len(),
            expected: N_GROUPS,
        });
    }
    Ok(omega.0[0] * (r.fb_bits / norms.fb_divisor) + omega.0[1] * (r.voip_penalty * norms.voip_factor))
}
