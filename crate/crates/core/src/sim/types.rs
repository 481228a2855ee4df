//! Domain types for the TTI-loop simulator.

use std::collections::{BTreeMap, VecDeque};

use serde::{Deserialize, Serialize};

/// TTI index; TTI 0 is "before the first tick".
pub type Tti = u64;
pub type FlowId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Downlink,
    Uplink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrafficGroup {
    FullBuffer,
    Voip,
}

impl TrafficGroup {
    pub fn code(&self) -> f64 {
        match self {
            TrafficGroup::FullBuffer => 0.0,
            TrafficGroup::Voip => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TrafficGroup::FullBuffer => "full_buffer",
            TrafficGroup::Voip => "voip",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QosRequirement {
    BestEffort,
    /// Hard bound on packet delay, in seconds (> 0).
    MaxDelay { max_delay_s: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub size_bits: u64,
    pub created_at: Tti,
    pub delivered_at: Option<Tti>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataFlow {
    pub id: FlowId,
    pub group: TrafficGroup,
    pub direction: Direction,
    pub qos: QosRequirement,
    pub buffer: VecDeque<Packet>,
    pub tti_last_scheduled: Option<Tti>,
    /// A failed transport block flags the flow until its next success; new
    /// transmission is the complement, so the XOR invariant holds by
    /// construction.
    pub is_retransmission: bool,
}

impl DataFlow {
    pub fn is_new_transmission(&self) -> bool {
        !self.is_retransmission
    }

    /// Bits waiting in the buffer. Full-buffer flows always report data.
    pub fn queued_bits(&self) -> u64 {
        match self.group {
            TrafficGroup::FullBuffer => u64::MAX,
            TrafficGroup::Voip => self.buffer.iter().map(|p| p.size_bits).sum(),
        }
    }

    pub fn has_data(&self) -> bool {
        match self.group {
            TrafficGroup::FullBuffer => true,
            TrafficGroup::Voip => !self.buffer.is_empty(),
        }
    }
}

/// Radio-grid abstraction: fixed spectral efficiency, independent UL/DL PRB
/// pools, and a shared per-TTI control-channel grant budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceGridConfig {
    pub prbs_per_direction: u32,
    pub bits_per_prb: u32,
    pub pdcch_capacity: u32,
    pub tti_duration_s: f64,
    pub bler: f64,
}

impl Default for ResourceGridConfig {
    fn default() -> Self {
        // 10 MHz at 30 kHz SCS collapsed to 24 PRBs per direction and 672
        // bits per PRB per slot (~32 Mbit/s peak downlink at 0.5 ms TTI).
        ResourceGridConfig {
            prbs_per_direction: 24,
            bits_per_prb: 672,
            pdcch_capacity: 3,
            tti_duration_s: 0.0005,
            bler: 0.01,
        }
    }
}

impl ResourceGridConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.prbs_per_direction == 0 || self.bits_per_prb == 0 || self.pdcch_capacity == 0 {
            return Err("grid counts must be positive".into());
        }
        if self.tti_duration_s <= 0.0 {
            return Err("tti_duration_s must be positive".into());
        }
        if !(0.0..1.0).contains(&self.bler) {
            return Err("bler must lie in [0, 1)".into());
        }
        Ok(())
    }

    /// Peak bits a single direction can carry in one TTI.
    pub fn peak_bits_per_tti(&self) -> u64 {
        self.prbs_per_direction as u64 * self.bits_per_prb as u64
    }
}

/// Outcome of one frequency-domain scheduling pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TtiAllocation {
    /// Flows holding a surviving control grant, in priority order.
    pub control_grants: Vec<FlowId>,
    /// PRBs granted per flow; every key appears in `control_grants`.
    pub data_grants: BTreeMap<FlowId, u32>,
}

impl TtiAllocation {
    pub fn is_empty(&self) -> bool {
        self.control_grants.is_empty()
    }
}
