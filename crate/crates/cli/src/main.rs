//! `eierl`: run seeded training experiments and write learning curves.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Parser;
use eierl_core::experiment::{final_window_mean, run_experiment};
use eierl_core::{AgentVariant, ExperimentConfig};

#[derive(Debug, Parser)]
#[command(name = "eierl", version, about = "Train dialogue policies and write learning curves")]
struct Args {
    /// TOML experiment config; flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in schema name (movie, restaurant, taxi) or a schema file path.
    #[arg(long)]
    schema: Option<String>,
    #[arg(long, value_parser = ["eierl", "erl", "ea", "dqn"])]
    agent: Option<String>,
    /// Exploration rate of the dqn agent.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Comma-separated seed list.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    pop_evo: Option<usize>,
    #[arg(long)]
    pop_drl: Option<usize>,
    #[arg(long)]
    mut_strength: Option<f64>,
    /// Disable elite injection (same as --agent erl).
    #[arg(long, conflicts_with = "agent")]
    no_eii: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Suppress per-seed progress lines.
    #[arg(long, short)]
    quiet: bool,
}

fn build_config(args: &Args) -> Result<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(schema) = &args.schema {
        cfg.schema = schema.clone();
    }
    if let Some(agent) = &args.agent {
        cfg.agent = agent.parse()?;
    }
    if args.no_eii {
        cfg.agent = AgentVariant::Erl;
    }
    if let Some(v) = args.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = args.epochs {
        cfg.epochs = v;
    }
    if let Some(v) = &args.seeds {
        cfg.seeds = v.clone();
    }
    if let Some(v) = args.pop_evo {
        cfg.pop_evo = v;
    }
    if let Some(v) = args.pop_drl {
        cfg.pop_drl = v;
    }
    if let Some(v) = args.mut_strength {
        cfg.mut_strength = v;
    }
    if let Some(v) = &args.out {
        cfg.out = v.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(args: Args) -> Result<()> {
    let cfg = build_config(&args).context("invalid configuration")?;
    let started = Instant::now();
    let quiet = args.quiet;
    let output = run_experiment(&cfg, |run| {
        if !quiet {
            eprintln!(
                "seed {:>6}: final-50 success {:.3} ({:.1}s)",
                run.seed,
                final_window_mean(&run.metrics, 50),
                started.elapsed().as_secs_f64()
            );
        }
    })
    .with_context(|| format!("experiment '{}' failed", cfg.agent))?;
    let last = output.mean.last().expect("at least one epoch");
    println!(
        "{} on {}: epoch {} success {:.3} reward {:.2} turns {:.2}; final-50 success {:.3}",
        cfg.agent,
        cfg.schema,
        last.epoch,
        last.success_rate,
        last.avg_reward,
        last.avg_turns,
        final_window_mean(&output.mean, 50)
    );
    println!("wrote {}", output.dir.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
