//! Greedy/baseline evaluation runs: simulate the configured horizon, export
//! per-TTI and per-packet artifacts, and summarize throughput percentiles
//! and delayed-packet fractions.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::agent::actor_sort_tti;
use crate::nn::checkpoint::Checkpoint;
use crate::policies::{ProportionalFair, RoundRobin, TdPolicy};
use crate::sim::{FlowId, Simulator, TrafficGroup};
use crate::sortmdp::{extract_features, FeatureLimits, FeatureStats, FEATURE_DIM};

use super::config::{ExperimentConfig, PolicyKind};
use super::io;
use super::stats::{mean, percentiles};
use super::HarnessError;

/// Where the evaluation policy comes from.
#[derive(Debug, Clone)]
pub enum EvalSource {
    Baseline(PolicyKind),
    Checkpoint(PathBuf),
}

/// Headline numbers for one evaluation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub policy: String,
    pub eval_ttis: u64,
    pub tpt_p10_bps: f64,
    pub tpt_p50_bps: f64,
    pub tpt_p90_bps: f64,
    pub mean_dl_bps: f64,
    pub delayed_fraction: f64,
    pub voip_packets: u64,
    pub reward_fb_total: f64,
    pub reward_voip_total: f64,
    pub runtime_s: f64,
}

#[derive(Debug)]
pub struct EvalOutcome {
    pub summary: RunSummary,
    pub tti_csv_path: PathBuf,
    pub delay_csv_path: PathBuf,
    pub summary_json_path: PathBuf,
}

/// The trained agent run greedily (ε = 0) behind the policy interface.
pub struct GreedyAgentPolicy {
    weights: crate::nn::PolicyParams,
    stats: Arc<FeatureStats>,
    limits: FeatureLimits,
    rng: ChaCha12Rng,
}

impl GreedyAgentPolicy {
    pub fn new(
        weights: crate::nn::PolicyParams,
        stats: Arc<FeatureStats>,
        limits: FeatureLimits,
    ) -> Self {
        GreedyAgentPolicy {
            weights,
            stats,
            limits,
            rng: ChaCha12Rng::seed_from_u64(0),
        }
    }
}

impl TdPolicy for GreedyAgentPolicy {
    fn sort_flows(&mut self, sim: &Simulator, ids: &[FlowId]) -> Vec<FlowId> {
        if ids.is_empty() {
            return Vec::new();
        }
        let xs: Vec<[f64; FEATURE_DIM]> = ids
            .iter()
            .map(|&id| {
                self.stats
                    .normalize(&extract_features(sim, id, &self.limits))
            })
            .collect();
        let out = actor_sort_tti(&xs, &self.weights, 0.0, &mut self.rng);
        out.order.iter().map(|&i| ids[i]).collect()
    }
}

fn build_policy(
    cfg: &ExperimentConfig,
    source: &EvalSource,
) -> Result<Box<dyn TdPolicy>, HarnessError> {
    match source {
        EvalSource::Baseline(PolicyKind::RoundRobin) => Ok(Box::new(RoundRobin {
            voip_first: cfg.policy.voip_first,
        })),
        EvalSource::Baseline(PolicyKind::ProportionalFair) => Ok(Box::new(ProportionalFair::new(
            cfg.policy.pf_ema,
            cfg.policy.pf_floor,
            cfg.policy.voip_first,
            cfg.reward.saturation_bits,
        ))),
        EvalSource::Baseline(PolicyKind::Qadra) => Err(HarnessError::Invalid(
            "the learned policy needs a checkpoint; use EvalSource::Checkpoint".into(),
        )),
        EvalSource::Checkpoint(path) => {
            let ckpt = Checkpoint::load(path)?;
            if ckpt.arch.feature_dim() != FEATURE_DIM {
                return Err(HarnessError::IncompatibleCheckpoint(format!(
                    "feature dimension {} != {}",
                    ckpt.arch.feature_dim(),
                    FEATURE_DIM
                )));
            }
            let stats = ckpt.stats.ok_or_else(|| {
                HarnessError::IncompatibleCheckpoint(
                    "checkpoint carries no feature statistics".into(),
                )
            })?;
            Ok(Box::new(GreedyAgentPolicy::new(
                ckpt.params.weights,
                Arc::new(stats),
                ckpt.limits,
            )))
        }
    }
}

fn policy_label(source: &EvalSource) -> String {
    match source {
        EvalSource::Baseline(kind) => kind.name().to_string(),
        EvalSource::Checkpoint(path) => format!("qadra:{}", path.display()),
    }
}

/// Run the configured evaluation horizon and export artifacts into
/// `out_dir` (per-TTI CSV, per-packet delay CSV, summary JSON).
pub fn run_eval(cfg: &ExperimentConfig, source: &EvalSource) -> Result<EvalOutcome, HarnessError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut sim = Simulator::new(&cfg.scenario, cfg.grid, cfg.run.seed);
    let mut policy = build_policy(cfg, source)?;
    for _ in 0..cfg.eval.ttis {
        crate::env::run_baseline_tti(&mut sim, policy.as_mut());
    }
    sim.flush_undelivered();
    let summary = summarize(cfg, &sim, &policy_label(source), started.elapsed().as_secs_f64());

    let out_dir = &cfg.run.out_dir;
    let label = match source {
        EvalSource::Baseline(kind) => kind.name().to_string(),
        EvalSource::Checkpoint(_) => "qadra".to_string(),
    };
    let tti_csv_path = out_dir.join(format!("{label}_tti.csv"));
    let delay_csv_path = out_dir.join(format!("{label}_delays.csv"));
    let summary_json_path = out_dir.join(format!("{label}_summary.json"));
    io::write_text(&tti_csv_path, &io::tti_csv(&sim.metrics))?;
    io::write_text(&delay_csv_path, &io::delay_csv(&sim.metrics))?;
    io::write_text(
        &summary_json_path,
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    Ok(EvalOutcome {
        summary,
        tti_csv_path,
        delay_csv_path,
        summary_json_path,
    })
}

pub fn summarize(
    cfg: &ExperimentConfig,
    sim: &Simulator,
    policy: &str,
    runtime_s: f64,
) -> RunSummary {
    let tti_s = cfg.grid.tti_duration_s;
    let dl_bps: Vec<f64> = sim
        .metrics
        .ttis
        .iter()
        .map(|r| r.dl_bits as f64 / tti_s)
        .collect();
    let (p10, p50, p90) = if dl_bps.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        let ps = percentiles(&dl_bps, &[0.1, 0.5, 0.9]).expect("nonempty");
        (ps[0], ps[1], ps[2])
    };
    let voip_packets = sim
        .metrics
        .delays
        .iter()
        .filter(|d| d.group == TrafficGroup::Voip)
        .count() as u64;
    RunSummary {
        policy: policy.to_string(),
        eval_ttis: cfg.eval.ttis,
        tpt_p10_bps: p10,
        tpt_p50_bps: p50,
        tpt_p90_bps: p90,
        mean_dl_bps: mean(&dl_bps),
        delayed_fraction: sim
            .metrics
            .delayed_fraction(TrafficGroup::Voip, cfg.scenario.voip_max_delay_s),
        voip_packets,
        reward_fb_total: sim.metrics.rewards.iter().map(|r| r.fb_bits).sum(),
        reward_voip_total: sim.metrics.rewards.iter().map(|r| r.voip_penalty).sum(),
        runtime_s,
    }
}
