//! Per-run accounting: per-TTI delivered bits, per-packet delays, and
//! per-TTI reward components.

use serde::{Deserialize, Serialize};

use super::types::{TrafficGroup, Tti};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TtiRecord {
    pub tti: Tti,
    pub dl_bits: u64,
    pub ul_bits: u64,
    pub n_scheduled: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayRecord {
    pub group: TrafficGroup,
    pub created_at: Tti,
    /// `None` for packets still undelivered when the run ended; their delay
    /// is the age at flush time.
    pub delivered_at: Option<Tti>,
    pub delay_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardRecord {
    pub tti: Tti,
    pub fb_bits: f64,
    pub voip_penalty: f64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct MetricsLog {
    pub ttis: Vec<TtiRecord>,
    pub delays: Vec<DelayRecord>,
    pub rewards: Vec<RewardRecord>,
}

impl MetricsLog {
    pub fn record_tti(&mut self, tti: Tti) {
        self.ttis.push(TtiRecord {
            tti,
            dl_bits: 0,
            ul_bits: 0,
            n_scheduled: 0,
        });
    }

    pub fn current_tti_mut(&mut self) -> &mut TtiRecord {
        self.ttis.last_mut().expect("no TTI recorded yet")
    }

    pub fn mean_dl_bits_per_tti(&self) -> f64 {
        if self.ttis.is_empty() {
            return 0.0;
        }
        self.ttis.iter().map(|t| t.dl_bits as f64).sum::<f64>() / self.ttis.len() as f64
    }

    /// Fraction of packets in `group` whose delay exceeds `bound_s`.
    /// Undelivered packets count with their flushed age.
    pub fn delayed_fraction(&self, group: TrafficGroup, bound_s: f64) -> f64 {
        let mut total = 0u64;
        let mut late = 0u64;
        for d in &self.delays {
            if d.group != group {
                continue;
            }
            total += 1;
            if d.delay_s > bound_s {
                late += 1;
            }
        }
        if total == 0 {
            0.0
        } else {
            late as f64 / total as f64
        }
    }
}
