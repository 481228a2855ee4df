//! Starvation sweep: evaluate a baseline policy across VoIP user counts and
//! tabulate mean downlink throughput.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, PolicyKind};
use super::eval::{run_eval, EvalSource};
use super::io;
use super::HarnessError;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_voip: u32,
    pub mean_dl_bps: f64,
    pub delayed_fraction: f64,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub csv_path: PathBuf,
}

/// One evaluation per VoIP count with the selected baseline policy; each run
/// reuses the same seed so only the traffic mix varies.
pub fn starvation_sweep(
    cfg: &ExperimentConfig,
    policy: PolicyKind,
    voip_counts: &[u32],
) -> Result<SweepOutcome, HarnessError> {
    if policy == PolicyKind::Qadra {
        return Err(HarnessError::Invalid(
            "the sweep drives baseline policies only".into(),
        ));
    }
    let mut rows = Vec::with_capacity(voip_counts.len());
    for &n in voip_counts {
        let mut run_cfg = cfg.clone();
        run_cfg.scenario.n_voip = n;
        run_cfg.run.out_dir = cfg.run.out_dir.join(format!("sweep_{n}"));
        let outcome = run_eval(&run_cfg, &EvalSource::Baseline(policy))?;
        rows.push(SweepRow {
            n_voip: n,
            mean_dl_bps: outcome.summary.mean_dl_bps,
            delayed_fraction: outcome.summary.delayed_fraction,
        });
    }
    let mut csv = String::from("n_voip,mean_dl_bps,delayed_fraction\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{}\n",
            r.n_voip, r.mean_dl_bps, r.delayed_fraction
        ));
    }
    let csv_path = cfg.run.out_dir.join("starvation_sweep.csv");
    io::write_text(&csv_path, &csv)?;
    Ok(SweepOutcome { rows, csv_path })
}
