//! Discrete TTI-loop simulator: traffic generation, flow and buffer state,
//! two-step frequency-domain allocation, transmission with retransmission
//! flagging, and throughput/delay accounting.
//!
//! One instance is single-threaded; training runs one instance per actor.
//! All randomness comes from the instance's seeded generator.

pub mod fd;
pub mod metrics;
pub mod types;

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

pub use fd::fd_schedule;
pub use metrics::{DelayRecord, MetricsLog, RewardRecord, TtiRecord};
pub use types::{
    DataFlow, Direction, FlowId, Packet, QosRequirement, ResourceGridConfig, TrafficGroup, Tti,
    TtiAllocation,
};

/// Arrival phase layout for the periodic VoIP sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VoipPhase {
    /// Every user generates packets on the same TTIs, which maximizes
    /// control-channel contention.
    Aligned,
    /// Users are offset evenly across the period.
    Spread,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n_voip: u32,
    pub full_buffer: bool,
    pub voip_period_ttis: u64,
    pub voip_packet_bits: u64,
    pub voip_max_delay_s: f64,
    pub voip_phase: VoipPhase,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        // one full-buffer downlink plus ten VoIP users (an uplink and a
        // downlink flow each); 320-bit packets every 20 ms, 100 ms deadline
        ScenarioConfig {
            n_voip: 10,
            full_buffer: true,
            voip_period_ttis: 40,
            voip_packet_bits: 320,
            voip_max_delay_s: 0.1,
            voip_phase: VoipPhase::Aligned,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.voip_period_ttis == 0 {
            return Err("voip_period_ttis must be positive".into());
        }
        if self.voip_packet_bits == 0 {
            return Err("voip_packet_bits must be positive".into());
        }
        if self.voip_max_delay_s <= 0.0 {
            return Err("voip_max_delay_s must be positive".into());
        }
        Ok(())
    }
}

/// What one TTI's transmission delivered, per granted flow, in grant order.
#[derive(Debug, Clone, Default)]
pub struct DeliveryReport {
    pub tti: Tti,
    pub flows: Vec<FlowDelivery>,
}

#[derive(Debug, Clone)]
pub struct FlowDelivery {
    pub flow: FlowId,
    pub group: TrafficGroup,
    pub direction: Direction,
    pub bits: u64,
    pub delays_s: Vec<f64>,
    pub failed: bool,
}

impl DeliveryReport {
    pub fn delivered_bits(&self, flow: FlowId) -> u64 {
        self.flows
            .iter()
            .find(|f| f.flow == flow)
            .map(|f| f.bits)
            .unwrap_or(0)
    }

    pub fn delays_for(&self, flow: FlowId) -> &[f64] {
        self.flows
            .iter()
            .find(|f| f.flow == flow)
            .map(|f| f.delays_s.as_slice())
            .unwrap_or(&[])
    }
}

#[derive(Debug)]
pub struct Simulator {
    scenario: ScenarioConfig,
    grid: ResourceGridConfig,
    tti: Tti,
    flows: BTreeMap<FlowId, DataFlow>,
    voip_phase_of: BTreeMap<FlowId, u64>,
    rng: ChaCha12Rng,
    pub metrics: MetricsLog,
}

pub const FULL_BUFFER_FLOW_ID: FlowId = 0;

impl Simulator {
    pub fn new(scenario: &ScenarioConfig, grid: ResourceGridConfig, seed: u64) -> Self {
        let mut flows = BTreeMap::new();
        let mut voip_phase_of = BTreeMap::new();
        if scenario.full_buffer {
            flows.insert(
                FULL_BUFFER_FLOW_ID,
                DataFlow {
                    id: FULL_BUFFER_FLOW_ID,
                    group: TrafficGroup::FullBuffer,
                    direction: Direction::Downlink,
                    qos: QosRequirement::BestEffort,
                    buffer: VecDeque::new(),
                    tti_last_scheduled: None,
                    is_retransmission: false,
                },
            );
        }
        for user in 0..scenario.n_voip {
            let phase = match scenario.voip_phase {
                VoipPhase::Aligned => 0,
                VoipPhase::Spread => {
                    (user as u64 * scenario.voip_period_ttis) / scenario.n_voip.max(1) as u64
                }
            };
            for (k, direction) in [Direction::Downlink, Direction::Uplink]
                .into_iter()
                .enumerate()
            {
                let id = 1 + 2 * user + k as u32;
                flows.insert(
                    id,
                    DataFlow {
                        id,
                        group: TrafficGroup::Voip,
                        direction,
                        qos: QosRequirement::MaxDelay {
                            max_delay_s: scenario.voip_max_delay_s,
                        },
                        buffer: VecDeque::new(),
                        tti_last_scheduled: None,
                        is_retransmission: false,
                    },
                );
                voip_phase_of.insert(id, phase);
            }
        }
        Simulator {
            scenario: scenario.clone(),
            grid,
            tti: 0,
            flows,
            voip_phase_of,
            rng: ChaCha12Rng::seed_from_u64(seed),
            metrics: MetricsLog::default(),
        }
    }

    pub fn now(&self) -> Tti {
        self.tti
    }

    pub fn grid(&self) -> &ResourceGridConfig {
        &self.grid
    }

    pub fn scenario(&self) -> &ScenarioConfig {
        &self.scenario
    }

    pub fn flows(&self) -> &BTreeMap<FlowId, DataFlow> {
        &self.flows
    }

    pub fn flow(&self, id: FlowId) -> &DataFlow {
        &self.flows[&id]
    }

    /// Advance one TTI: inject scheduled VoIP arrivals and return the ids of
    /// all flows with data, in ascending id order. An empty result is valid.
    pub fn advance_tti(&mut self) -> Vec<FlowId> {
        self.tti += 1;
        let t = self.tti;
        for (id, flow) in self.flows.iter_mut() {
            if flow.group != TrafficGroup::Voip {
                continue;
            }
            let phase = self.voip_phase_of[id];
            if t % self.scenario.voip_period_ttis == phase % self.scenario.voip_period_ttis {
                flow.buffer.push_back(Packet {
                    size_bits: self.scenario.voip_packet_bits,
                    created_at: t,
                    delivered_at: None,
                });
            }
        }
        self.metrics.record_tti(t);
        self.flows
            .values()
            .filter(|f| f.has_data())
            .map(|f| f.id)
            .collect()
    }

    /// Frequency-domain pass over a priority-ordered flow list.
    pub fn fd_schedule(&self, priority: &[FlowId]) -> TtiAllocation {
        fd_schedule(&self.flows, &self.grid, priority)
    }

    /// Transmit over the allocation: per granted flow a Bernoulli transport
    /// block failure decides between delivery (packets removed head-first,
    /// delays logged) and a retransmission flag for the next TTI.
    pub fn transmit(&mut self, alloc: &TtiAllocation) -> DeliveryReport {
        let t = self.tti;
        let tti_s = self.grid.tti_duration_s;
        let mut report = DeliveryReport {
            tti: t,
            flows: Vec::with_capacity(alloc.control_grants.len()),
        };
        let mut dl_bits = 0u64;
        let mut ul_bits = 0u64;
        for &id in &alloc.control_grants {
            let prbs = alloc.data_grants[&id];
            let flow = self.flows.get_mut(&id).expect("granted flow must exist");
            flow.tti_last_scheduled = Some(t);
            let failed = self.rng.random::<f64>() < self.grid.bler;
            let mut delivery = FlowDelivery {
                flow: id,
                group: flow.group,
                direction: flow.direction,
                bits: 0,
                delays_s: Vec::new(),
                failed,
            };
            if failed {
                flow.is_retransmission = true;
            } else {
                flow.is_retransmission = false;
                let grant_bits = prbs as u64 * self.grid.bits_per_prb as u64;
                match flow.group {
                    TrafficGroup::FullBuffer => {
                        delivery.bits = grant_bits;
                    }
                    TrafficGroup::Voip => {
                        let mut budget = grant_bits;
                        while let Some(front) = flow.buffer.front() {
                            if front.size_bits > budget {
                                break;
                            }
                            let mut pkt = flow.buffer.pop_front().unwrap();
                            budget -= pkt.size_bits;
                            pkt.delivered_at = Some(t);
                            let delay_s = (t - pkt.created_at) as f64 * tti_s;
                            delivery.bits += pkt.size_bits;
                            delivery.delays_s.push(delay_s);
                            self.metrics.delays.push(DelayRecord {
                                group: TrafficGroup::Voip,
                                created_at: pkt.created_at,
                                delivered_at: Some(t),
                                delay_s,
                            });
                        }
                    }
                }
                match flow.direction {
                    Direction::Downlink => dl_bits += delivery.bits,
                    Direction::Uplink => ul_bits += delivery.bits,
                }
            }
            report.flows.push(delivery);
        }
        let rec = self.metrics.current_tti_mut();
        rec.dl_bits += dl_bits;
        rec.ul_bits += ul_bits;
        rec.n_scheduled += alloc.control_grants.len() as u32;
        report
    }

    /// Per-flow per-TTI QoS predicate for delay-bounded flows: violated when
    /// a packet delivered this TTI exceeded the bound or a buffered packet
    /// has already aged past it.
    ///
    /// Panics for best-effort flows; they carry no delay bound.
    pub fn qos_satisfied(&self, id: FlowId, report: &DeliveryReport) -> bool {
        let flow = &self.flows[&id];
        let bound = match flow.qos {
            QosRequirement::MaxDelay { max_delay_s } => max_delay_s,
            QosRequirement::BestEffort => {
                panic!("qos_satisfied is undefined for best-effort flows")
            }
        };
        let tti_s = self.grid.tti_duration_s;
        if report.delays_for(id).iter().any(|&d| d > bound) {
            return false;
        }
        let now = self.tti;
        !flow
            .buffer
            .iter()
            .any(|p| (now - p.created_at) as f64 * tti_s > bound)
    }

    /// Count of delay-bounded flows violating their QoS this TTI.
    pub fn qos_violations(&self, report: &DeliveryReport) -> u32 {
        self.flows
            .values()
            .filter(|f| matches!(f.qos, QosRequirement::MaxDelay { .. }))
            .filter(|f| !self.qos_satisfied(f.id, report))
            .count() as u32
    }

    /// Log undelivered packets with their current age; call once at run end
    /// so stalled packets still show up in the delay distribution.
    pub fn flush_undelivered(&mut self) {
        let now = self.tti;
        let tti_s = self.grid.tti_duration_s;
        for flow in self.flows.values() {
            if flow.group != TrafficGroup::Voip {
                continue;
            }
            for pkt in &flow.buffer {
                self.metrics.delays.push(DelayRecord {
                    group: TrafficGroup::Voip,
                    created_at: pkt.created_at,
                    delivered_at: None,
                    delay_s: (now - pkt.created_at) as f64 * tti_s,
                });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_grid_no_bler() -> ResourceGridConfig {
        ResourceGridConfig {
            bler: 0.0,
            ..ResourceGridConfig::default()
        }
    }

    #[test]
    fn paper_scenario_has_21_flows_at_arrival_tti() {
        let scenario = ScenarioConfig::default();
        let mut sim = Simulator::new(&scenario, default_grid_no_bler(), 0);
        let mut last = Vec::new();
        for _ in 0..40 {
            last = sim.advance_tti();
        }
        // 1 full buffer + 10 users x 2 directions
        assert_eq!(last.len(), 21);
    }

    #[test]
    fn empty_scenario_yields_empty_flow_list() {
        let scenario = ScenarioConfig {
            n_voip: 0,
            full_buffer: false,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulator::new(&scenario, default_grid_no_bler(), 0);
        assert!(sim.advance_tti().is_empty());
    }

    #[test]
    fn voip_arrivals_land_exactly_on_schedule() {
        let scenario = ScenarioConfig {
            n_voip: 1,
            full_buffer: false,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulator::new(&scenario, default_grid_no_bler(), 0);
        for t in 1..=160 {
            sim.advance_tti();
            let dl = sim.flow(1);
            let expected = (t / 40) as usize;
            assert_eq!(
                dl.buffer.len(),
                expected,
                "buffer size at tti {t} should be {expected}"
            );
        }
    }

    #[test]
    fn bler_zero_delivers_min_of_buffer_and_grant() {
        let scenario = ScenarioConfig {
            n_voip: 1,
            full_buffer: true,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulator::new(&scenario, default_grid_no_bler(), 0);
        for _ in 0..40 {
            sim.advance_tti();
        }
        // voip first so the full buffer cannot exhaust the downlink pool
        let alloc = sim.fd_schedule(&[1, 2, 0]);
        let report = sim.transmit(&alloc);
        // voip dl (id 1) wanted 320 bits -> delivered in full
        assert_eq!(report.delivered_bits(1), 320);
        // full buffer delivers its entire grant
        let fb_prbs = alloc.data_grants[&FULL_BUFFER_FLOW_ID] as u64;
        assert_eq!(report.delivered_bits(0), fb_prbs * 672);
    }

    #[test]
    fn bler_one_delivers_nothing_and_flags_retransmission() {
        let grid = ResourceGridConfig {
            bler: 0.999999999,
            ..ResourceGridConfig::default()
        };
        let scenario = ScenarioConfig {
            n_voip: 1,
            full_buffer: true,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulator::new(&scenario, grid, 0);
        let mut ids = Vec::new();
        for _ in 0..40 {
            ids = sim.advance_tti();
        }
        let alloc = sim.fd_schedule(&ids);
        let report = sim.transmit(&alloc);
        for d in &report.flows {
            assert!(d.failed);
            assert_eq!(d.bits, 0);
        }
        for &id in &alloc.control_grants {
            assert!(sim.flow(id).is_retransmission);
            assert_eq!(sim.flow(id).tti_last_scheduled, Some(sim.now()));
        }
    }

    #[test]
    fn delivery_delay_is_ttis_times_duration() {
        let scenario = ScenarioConfig {
            n_voip: 1,
            full_buffer: false,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulator::new(&scenario, default_grid_no_bler(), 0);
        for _ in 0..40 {
            sim.advance_tti();
        }
        // sit on the packet for 30 more TTIs, then deliver at t = 70
        for _ in 0..30 {
            sim.advance_tti();
        }
        let alloc = sim.fd_schedule(&[1]);
        let report = sim.transmit(&alloc);
        let delays = report.delays_for(1);
        assert_eq!(delays.len(), 1);
        assert!((delays[0] - 0.015).abs() < 1e-12);
    }

    #[test]
    fn qos_boundary_cases() {
        let scenario = ScenarioConfig {
            n_voip: 1,
            full_buffer: false,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulator::new(&scenario, default_grid_no_bler(), 0);
        for _ in 0..40 {
            sim.advance_tti();
        }
        let empty_report = DeliveryReport::default();
        // age 0.1005s at t = 241 (201 TTIs): violated
        for _ in 0..201 {
            sim.advance_tti();
        }
        assert!(!sim.qos_satisfied(1, &empty_report));
        // uplink flow got a packet at the same time; also overdue
        assert_eq!(sim.qos_violations(&empty_report), 2);
    }

    #[test]
    fn qos_delivered_under_bound_is_satisfied() {
        let scenario = ScenarioConfig {
            n_voip: 1,
            full_buffer: false,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulator::new(&scenario, default_grid_no_bler(), 0);
        for _ in 0..40 {
            sim.advance_tti();
        }
        // deliver at age 199 TTIs = 0.0995 s: inside the 0.1 s bound
        for _ in 0..199 {
            sim.advance_tti();
        }
        let alloc = sim.fd_schedule(&[1]);
        let report = sim.transmit(&alloc);
        assert!((report.delays_for(1)[0] - 0.0995).abs() < 1e-12);
        assert!(sim.qos_satisfied(1, &report));
        // the untouched uplink flow's oldest packet is exactly at the bound
        assert!(sim.qos_satisfied(2, &DeliveryReport::default()));
    }

    // Throughput bound and delay bookkeeping under a random policy: per-TTI
    // DL bits never exceed the pool capacity and every logged delay is the
    // delivery gap times the TTI duration.
    #[test]
    fn random_policy_respects_throughput_and_delay_invariants() {
        use rand::seq::SliceRandom;
        use rand_chacha::rand_core::SeedableRng;
        let scenario = ScenarioConfig {
            n_voip: 6,
            full_buffer: true,
            ..ScenarioConfig::default()
        };
        let grid = ResourceGridConfig {
            pdcch_capacity: 8,
            ..ResourceGridConfig::default()
        };
        let mut sim = Simulator::new(&scenario, grid, 3);
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(8);
        for _ in 0..2000 {
            let mut ids = sim.advance_tti();
            ids.shuffle(&mut rng);
            let alloc = sim.fd_schedule(&ids);
            sim.transmit(&alloc);
        }
        let peak = sim.grid().peak_bits_per_tti();
        for rec in &sim.metrics.ttis {
            assert!(rec.dl_bits <= peak, "tti {}: {} bits", rec.tti, rec.dl_bits);
            assert!(rec.ul_bits <= peak);
        }
        sim.flush_undelivered();
        for d in &sim.metrics.delays {
            assert!(d.delay_s >= 0.0);
            if let Some(t) = d.delivered_at {
                let want = (t - d.created_at) as f64 * sim.grid().tti_duration_s;
                assert_eq!(d.delay_s, want);
            }
        }
    }

    #[test]
    #[should_panic(expected = "best-effort")]
    fn qos_on_best_effort_flow_panics() {
        let scenario = ScenarioConfig {
            n_voip: 0,
            full_buffer: true,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulator::new(&scenario, default_grid_no_bler(), 0);
        sim.advance_tti();
        sim.qos_satisfied(FULL_BUFFER_FLOW_ID, &DeliveryReport::default());
    }

    #[test]
    fn empty_buffer_is_satisfied() {
        let scenario = ScenarioConfig {
            n_voip: 1,
            full_buffer: false,
            ..ScenarioConfig::default()
        };
        let mut sim = Simulator::new(&scenario, default_grid_no_bler(), 0);
        sim.advance_tti();
        assert!(sim.qos_satisfied(1, &DeliveryReport::default()));
    }
}
