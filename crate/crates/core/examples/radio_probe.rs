// Temporary diagnostic: radio smoke training for preference extremes.
use qadra::harness::{run_eval, run_training, EvalSource, ExperimentConfig};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let w_fb: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1.0);
    let w_voip: f64 = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(0.0);
    let seed: u64 = args.get(3).map(|s| s.parse().unwrap()).unwrap_or(1);
    let mut cfg = ExperimentConfig::radio_smoke_profile(seed, [w_fb, w_voip]);
    if let Some(cap) = args.get(4) {
        cfg.grid.pdcch_capacity = cap.parse().unwrap();
    }
    cfg.run.out_dir = std::path::PathBuf::from(format!(
        "/tmp/radio_probe/w{}_{}_s{}",
        w_fb, w_voip, seed
    ));
    let t0 = std::time::Instant::now();
    let outcome = run_training(&cfg).unwrap();
    println!(
        "trained {} steps / {} ttis in {:.0}s",
        outcome.learner_steps,
        outcome.total_ttis,
        t0.elapsed().as_secs_f64()
    );
    let eval = run_eval(
        &cfg,
        &EvalSource::Checkpoint(outcome.checkpoint_path.clone()),
    )
    .unwrap();
    println!(
        "omega [{w_fb},{w_voip}] seed {seed}: mean_dl {:.2} Mbit/s p50 {:.2} delayed {:.4} ({} pkts)",
        eval.summary.mean_dl_bps / 1e6,
        eval.summary.tpt_p50_bps / 1e6,
        eval.summary.delayed_fraction,
        eval.summary.voip_packets
    );
}
