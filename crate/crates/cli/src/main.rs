//! `qadra` — train, evaluate, and sweep the learned NR time-domain
//! scheduler and its baselines.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qadra::harness::{
    run_eval, run_training, starvation_sweep, EvalSource, ExperimentConfig, PolicyKind,
};
use qadra::nn::checkpoint::Checkpoint;

#[derive(Parser)]
#[command(name = "qadra", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Configuration file (defaults apply when omitted)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override the run seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Force the deterministic single-threaded training topology
    #[arg(long)]
    deterministic: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Train the scheduler and write a checkpoint plus a training log
    Train(CommonOpts),
    /// Evaluate a trained checkpoint greedily
    Eval {
        #[command(flatten)]
        common: CommonOpts,
        /// Parameter checkpoint produced by `train`
        #[arg(long)]
        checkpoint: PathBuf,
    },
    /// Evaluate a heuristic baseline policy
    Baseline {
        #[command(flatten)]
        common: CommonOpts,
        /// round_robin or proportional_fair; defaults to the config's td_policy
        #[arg(long)]
        policy: Option<String>,
    },
    /// Starvation sweep: baseline throughput across VoIP user counts
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        /// round_robin or proportional_fair
        #[arg(long, default_value = "round_robin")]
        policy: String,
        /// Comma-separated VoIP user counts
        #[arg(long, default_value = "0,5,10,15,20", value_delimiter = ',')]
        counts: Vec<u32>,
    },
    /// Print checkpoint metadata (shapes, version, feature statistics)
    InspectCheckpoint {
        #[arg(long)]
        checkpoint: PathBuf,
    },
}

fn load_config(common: &CommonOpts) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)
            .with_context(|| format!("loading config {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.run.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.run.out_dir = out.clone();
    }
    if common.deterministic {
        cfg.train.deterministic = true;
    }
    Ok(cfg)
}

fn parse_policy(name: &str) -> Result<PolicyKind> {
    match name {
        "round_robin" => Ok(PolicyKind::RoundRobin),
        "proportional_fair" => Ok(PolicyKind::ProportionalFair),
        other => bail!("unknown baseline policy `{other}` (round_robin|proportional_fair)"),
    }
}

fn main() {
    if let Err(err) = run() {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Train(common) => {
            let cfg = load_config(&common)?;
            let outcome = run_training(&cfg)?;
            println!(
                "trained {} learner steps over {} TTIs{}",
                outcome.learner_steps,
                outcome.total_ttis,
                if outcome.early_stopped {
                    " (early stop)"
                } else {
                    ""
                }
            );
            println!("checkpoint: {}", outcome.checkpoint_path.display());
            println!("log: {}", outcome.log_path.display());
        }
        Command::Eval { common, checkpoint } => {
            let cfg = load_config(&common)?;
            let outcome = run_eval(&cfg, &EvalSource::Checkpoint(checkpoint))?;
            println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
            println!("per-TTI csv: {}", outcome.tti_csv_path.display());
            println!("delay csv: {}", outcome.delay_csv_path.display());
        }
        Command::Baseline { common, policy } => {
            let cfg = load_config(&common)?;
            let kind = match policy {
                Some(name) => parse_policy(&name)?,
                None => match cfg.policy.td_policy {
                    PolicyKind::Qadra => bail!(
                        "td_policy is qadra; use `eval --checkpoint` for the learned policy"
                    ),
                    kind => kind,
                },
            };
            let outcome = run_eval(&cfg, &EvalSource::Baseline(kind))?;
            println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
        }
        Command::Sweep {
            common,
            policy,
            counts,
        } => {
            let cfg = load_config(&common)?;
            let kind = parse_policy(&policy)?;
            let outcome = starvation_sweep(&cfg, kind, &counts)?;
            println!("n_voip,mean_dl_bps,delayed_fraction");
            for row in &outcome.rows {
                println!(
                    "{},{:.0},{:.6}",
                    row.n_voip, row.mean_dl_bps, row.delayed_fraction
                );
            }
            println!("table: {}", outcome.csv_path.display());
        }
        Command::InspectCheckpoint { checkpoint } => {
            let ckpt = Checkpoint::load(&checkpoint)?;
            println!("parameter version: {}", ckpt.params.version);
            println!("encoder dense dims: {:?}", ckpt.arch.encoder_dense);
            println!("encoder gru dims: {:?}", ckpt.arch.encoder_gru);
            println!("q-net dims: {:?}", ckpt.arch.q_dims());
            println!("parameters: {}", ckpt.params.weights.param_count());
            match &ckpt.stats {
                Some(stats) => {
                    println!("feature means: {:?}", stats.mean);
                    println!("feature stds: {:?}", stats.std);
                }
                None => println!("feature statistics: none"),
            }
        }
    }
    Ok(())
}
