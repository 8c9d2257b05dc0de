use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use svp::harness::{emit_results, manifest_path, run_experiment, ExperimentConfig, ExperimentKind, Manifest};

#[derive(Parser)]
#[command(name = "svp", version, about = "Low-rank recovery experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian-ensemble recovery, SVP vs SVT
    ArmpTiming(Overrides),
    /// Rank-4 logo reconstruction from Gaussian measurements
    Logo(Overrides),
    /// Noiseless matrix completion, SVP vs SVT
    CompletionTiming(Overrides),
    /// Rank-selection heuristics on instances of known rank
    RankSweep(Overrides),
    /// SVP, SVT and ALS on noisy completion instances
    Noise(Overrides),
    /// Recovery threshold in the sampling density
    Threshold(Overrides),
    /// Incoherence of SVP iterates
    Incoherence(Overrides),
    /// Held-out RMSE on ratings data, SVP vs ALS
    Ratings(Overrides),
}

#[derive(Args)]
struct Overrides {
    /// JSON config; omitted fields take the experiment defaults
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV output path (manifest is written next to it)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trials: Option<usize>,
}

impl Command {
    fn split(self) -> (ExperimentKind, Overrides) {
        match self {
            Command::ArmpTiming(o) => (ExperimentKind::ArmpTiming, o),
            Command::Logo(o) => (ExperimentKind::LogoRecon, o),
            Command::CompletionTiming(o) => (ExperimentKind::CompletionTiming, o),
            Command::RankSweep(o) => (ExperimentKind::RankSweep, o),
            Command::Noise(o) => (ExperimentKind::NoiseRobustness, o),
            Command::Threshold(o) => (ExperimentKind::ThresholdSweep, o),
            Command::Incoherence(o) => (ExperimentKind::IncoherenceTrace, o),
            Command::Ratings(o) => (ExperimentKind::Ratings, o),
        }
    }
}

/// `SOURCE_DATE_EPOCH` when set, so reruns can produce identical manifests.
fn timestamp() -> String {
    std::env::var("SOURCE_DATE_EPOCH").unwrap_or_else(|_| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
            .to_string()
    })
}

fn run(kind: ExperimentKind, o: Overrides) -> svp::Result<bool> {
    let mut cfg = match &o.config {
        Some(path) => ExperimentConfig::load(path, Some(kind))?,
        None => ExperimentConfig::defaults(kind),
    };
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if let Some(out) = o.out {
        cfg.output = out;
    }
    if let Some(trials) = o.trials {
        cfg.trials = trials;
    }
    cfg.validate()?;

    log::info!("running {} with seed {}", kind.name(), cfg.seed);
    let outcome = run_experiment(&cfg)?;
    let manifest = Manifest::new(kind.name(), cfg.to_json(), timestamp(), outcome.failures.clone());
    emit_results(&outcome.rows, &cfg.output, &manifest)?;
    println!(
        "{}: {} rows -> {} (manifest {})",
        kind.name(),
        outcome.rows.len(),
        cfg.output.display(),
        manifest_path(&cfg.output).display()
    );
    for failure in &outcome.failures {
        eprintln!("FAIL {failure}");
    }
    Ok(outcome.passed())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let (kind, overrides) = Cli::parse().command.split();
    match run(kind, overrides) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
