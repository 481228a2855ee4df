//! Cross-module integration: evaluation artifacts, summary consistency,
//! config files shipped in configs/, and the threaded training topology.

use std::path::PathBuf;

use qadra::harness::{
    io, run_eval, run_training, EvalSource, ExperimentConfig, PolicyKind,
};
use qadra::sim::TrafficGroup;

fn out_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir()
        .join("qadra_integration")
        .join(format!("{}_{}", tag, std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

// Closed-form peak rate: round robin, no VoIP, no failures -> every TTI
// carries 24 x 672 bits, 32.256 Mbit/s, and all percentiles coincide.
#[test]
fn lone_full_buffer_hits_peak_rate() {
    let mut cfg = ExperimentConfig::default();
    cfg.scenario.n_voip = 0;
    cfg.grid.bler = 0.0;
    cfg.eval.ttis = 2_000;
    cfg.run.out_dir = out_dir("peak");
    let outcome = run_eval(&cfg, &EvalSource::Baseline(PolicyKind::RoundRobin)).unwrap();
    let s = &outcome.summary;
    let peak = 24.0 * 672.0 / 0.0005;
    assert_eq!(s.tpt_p10_bps, peak);
    assert_eq!(s.tpt_p50_bps, peak);
    assert_eq!(s.tpt_p90_bps, peak);
    assert_eq!(s.mean_dl_bps, peak);
    assert_eq!(s.delayed_fraction, 0.0);
}

#[test]
fn empty_scenario_yields_zero_summary() {
    let mut cfg = ExperimentConfig::default();
    cfg.scenario.n_voip = 0;
    cfg.scenario.full_buffer = false;
    cfg.eval.ttis = 500;
    cfg.run.out_dir = out_dir("empty");
    let outcome = run_eval(&cfg, &EvalSource::Baseline(PolicyKind::RoundRobin)).unwrap();
    assert_eq!(outcome.summary.mean_dl_bps, 0.0);
    assert_eq!(outcome.summary.delayed_fraction, 0.0);
    assert_eq!(outcome.summary.voip_packets, 0);
    // the delay CSV holds only its header
    let delay_csv = std::fs::read_to_string(&outcome.delay_csv_path).unwrap();
    assert_eq!(delay_csv.lines().count(), 1);
}

// The summary's delayed fraction must equal the value recomputed from the
// exported delay CSV.
#[test]
fn summary_matches_exported_delay_csv() {
    let mut cfg = ExperimentConfig::default();
    cfg.scenario.n_voip = 8;
    cfg.eval.ttis = 3_000;
    cfg.run.out_dir = out_dir("consistency");
    // starve aggressively so late packets actually exist: tiny control budget
    cfg.grid.pdcch_capacity = 1;
    cfg.policy.voip_first = false;
    let outcome = run_eval(&cfg, &EvalSource::Baseline(PolicyKind::ProportionalFair)).unwrap();
    let csv = std::fs::read_to_string(&outcome.delay_csv_path).unwrap();
    let recomputed =
        io::delayed_fraction_from_csv(&csv, TrafficGroup::Voip, cfg.scenario.voip_max_delay_s);
    assert_eq!(outcome.summary.delayed_fraction, recomputed);
    assert!(outcome.summary.voip_packets > 0);
}

// Baseline evaluations are seed-deterministic end to end.
#[test]
fn baseline_eval_is_seed_deterministic() {
    let run = |dir: &str| {
        let mut cfg = ExperimentConfig::default();
        cfg.scenario.n_voip = 6;
        cfg.eval.ttis = 2_000;
        cfg.run.seed = 33;
        cfg.run.out_dir = out_dir(dir);
        run_eval(&cfg, &EvalSource::Baseline(PolicyKind::RoundRobin)).unwrap()
    };
    let a = run("det_a");
    let b = run("det_b");
    assert_eq!(
        std::fs::read(&a.tti_csv_path).unwrap(),
        std::fs::read(&b.tti_csv_path).unwrap()
    );
    assert_eq!(
        std::fs::read(&a.delay_csv_path).unwrap(),
        std::fs::read(&b.delay_csv_path).unwrap()
    );
}

// Every config file shipped in configs/ parses and validates.
#[test]
fn shipped_configs_are_valid() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) == Some("cfg") {
            ExperimentConfig::load(&path)
                .unwrap_or_else(|e| panic!("{} invalid: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 4, "expected the shipped profiles, found {seen}");
}

// The threaded topology (free-running actors, learner on the main thread)
// completes a small run and produces a usable checkpoint.
#[test]
fn threaded_training_smoke() {
    let mut cfg = ExperimentConfig::radio_smoke_profile(5, [10.0, 0.1]);
    cfg.train.total_ttis = 12_000;
    cfg.replay.warmup = 500;
    cfg.train.deterministic = false;
    cfg.train.n_actors = 2;
    cfg.run.out_dir = out_dir("threaded");
    let outcome = run_training(&cfg).unwrap();
    assert!(outcome.learner_steps > 0, "learner never stepped");
    assert!(outcome.total_ttis >= 12_000);
    let ckpt = qadra::nn::checkpoint::Checkpoint::load(&outcome.checkpoint_path).unwrap();
    assert!(ckpt.params.weights.is_finite());
    assert!(ckpt.stats.is_some());
    // the log has the header plus one line per learner step
    let log = std::fs::read_to_string(&outcome.log_path).unwrap();
    assert_eq!(log.lines().count() as u64, outcome.learner_steps + 1);
    // a checkpoint from the threaded run evaluates cleanly
    let eval = run_eval(&cfg, &EvalSource::Checkpoint(outcome.checkpoint_path)).unwrap();
    assert!(eval.summary.mean_dl_bps > 0.0);
}

// Zero-TTI budget: the checkpoint is the initialization and the log is
// only a header.
#[test]
fn zero_budget_training_checkpoints_initialization() {
    let mut cfg = ExperimentConfig::radio_smoke_profile(9, [1.0, 0.0]);
    cfg.train.total_ttis = 0;
    cfg.run.out_dir = out_dir("zero");
    let outcome = run_training(&cfg).unwrap();
    assert_eq!(outcome.learner_steps, 0);
    assert_eq!(outcome.total_ttis, 0);
    assert_eq!(outcome.final_version, 0);
    let log = std::fs::read_to_string(&outcome.log_path).unwrap();
    assert_eq!(log, "step,loss,mean_abs_td,epsilon,buffer_size,param_version\n");
    let ckpt = qadra::nn::checkpoint::Checkpoint::load(&outcome.checkpoint_path).unwrap();
    assert_eq!(ckpt.params.version, 0);
}

// Incompatible checkpoints are rejected with a diagnostic.
#[test]
fn eval_rejects_checkpoint_without_stats() {
    let cfg = {
        let mut c = ExperimentConfig::default();
        c.run.out_dir = out_dir("nostats");
        c
    };
    let arch = cfg.arch();
    let ckpt = qadra::nn::checkpoint::Checkpoint {
        arch: arch.clone(),
        params: qadra::nn::ParamSet::new(arch.zeros()),
        limits: cfg.limits(),
        stats: None,
    };
    let path = cfg.run.out_dir.join("no_stats.bin");
    ckpt.save(&path).unwrap();
    let err = run_eval(&cfg, &EvalSource::Checkpoint(path)).unwrap_err();
    assert!(err.to_string().contains("feature statistics"));
}
