//! Frequency-domain scheduler: two sequential steps per TTI. Control grants
//! go to the highest-priority flows up to the control-channel budget, then
//! data PRBs are assigned in the same order until each direction's pool is
//! exhausted. A flow that ends up with zero PRBs loses its control grant.

use std::collections::BTreeMap;

use super::types::{DataFlow, Direction, FlowId, ResourceGridConfig, TrafficGroup, TtiAllocation};

pub fn fd_schedule(
    flows: &BTreeMap<FlowId, DataFlow>,
    grid: &ResourceGridConfig,
    priority: &[FlowId],
) -> TtiAllocation {
    let mut alloc = TtiAllocation::default();
    let mut remaining_dl = grid.prbs_per_direction;
    let mut remaining_ul = grid.prbs_per_direction;
    let attempts = priority.len().min(grid.pdcch_capacity as usize);
    for &id in &priority[..attempts] {
        let flow = match flows.get(&id) {
            Some(f) => f,
            None => continue,
        };
        let pool = match flow.direction {
            Direction::Downlink => &mut remaining_dl,
            Direction::Uplink => &mut remaining_ul,
        };
        let wanted = match flow.group {
            TrafficGroup::FullBuffer => *pool,
            TrafficGroup::Voip => {
                let bits = flow.queued_bits();
                bits.div_ceil(grid.bits_per_prb as u64).min(*pool as u64) as u32
            }
        };
        if wanted == 0 {
            // control grant deleted: no data resources could be assigned
            continue;
        }
        *pool -= wanted;
        alloc.control_grants.push(id);
        alloc.data_grants.insert(id, wanted);
    }
    alloc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{ScenarioConfig, Simulator, VoipPhase};

    fn grid(cap: u32) -> ResourceGridConfig {
        ResourceGridConfig {
            prbs_per_direction: 24,
            bits_per_prb: 672,
            pdcch_capacity: cap,
            tti_duration_s: 0.0005,
            bler: 0.0,
        }
    }

    fn two_flow_sim() -> Simulator {
        // one full-buffer DL flow and one VoIP user (DL flow gets one packet)
        let scenario = ScenarioConfig {
            n_voip: 1,
            full_buffer: true,
            voip_period_ttis: 40,
            voip_packet_bits: 320,
            voip_max_delay_s: 0.1,
            voip_phase: VoipPhase::Aligned,
        };
        let mut sim = Simulator::new(&scenario, grid(2), 1);
        for _ in 0..40 {
            sim.advance_tti();
        }
        sim
    }

    #[test]
    fn empty_priority_list_yields_empty_allocation() {
        let sim = two_flow_sim();
        let alloc = fd_schedule(sim.flows(), sim.grid(), &[]);
        assert!(alloc.is_empty());
        assert!(alloc.data_grants.is_empty());
    }

    // Full buffer first: it absorbs the whole DL pool, the VoIP downlink flow
    // gets zero PRBs and its control grant is deleted.
    #[test]
    fn full_buffer_first_starves_voip_downlink() {
        let sim = two_flow_sim();
        let fb = 0u32;
        let voip_dl = 1u32;
        let alloc = fd_schedule(sim.flows(), sim.grid(), &[fb, voip_dl]);
        assert_eq!(alloc.data_grants.get(&fb), Some(&24));
        assert_eq!(alloc.data_grants.get(&voip_dl), None);
        assert_eq!(alloc.control_grants, vec![fb]);
    }

    // VoIP first: 320 bits fit in one PRB (ceil(320/672) = 1), the full
    // buffer takes the remaining 23.
    #[test]
    fn voip_first_takes_one_prb() {
        let sim = two_flow_sim();
        let fb = 0u32;
        let voip_dl = 1u32;
        let alloc = fd_schedule(sim.flows(), sim.grid(), &[voip_dl, fb]);
        assert_eq!(alloc.data_grants.get(&voip_dl), Some(&1));
        assert_eq!(alloc.data_grants.get(&fb), Some(&23));
        assert_eq!(alloc.control_grants, vec![voip_dl, fb]);
    }

    #[test]
    fn control_capacity_caps_grants() {
        let scenario = ScenarioConfig {
            n_voip: 4,
            full_buffer: false,
            voip_period_ttis: 10,
            voip_packet_bits: 320,
            voip_max_delay_s: 0.1,
            voip_phase: VoipPhase::Aligned,
        };
        let mut sim = Simulator::new(&scenario, grid(2), 7);
        let mut ids = Vec::new();
        for _ in 0..10 {
            ids = sim.advance_tti();
        }
        assert_eq!(ids.len(), 8);
        let alloc = fd_schedule(sim.flows(), sim.grid(), &ids);
        assert_eq!(alloc.control_grants.len(), 2);
    }
}
