//! Batch front door for the spectral limit toolkit.
//!
//! Every subcommand reads one TOML experiment file (`--config`), executes,
//! and writes its outputs plus a `run_record.json` into a directory named
//! by the (config, command, seed) digest under `--out` (default `runs/`).
//! Reruns with identical inputs produce byte-identical numeric outputs.
//!
//! Environment overrides (lowest precedence below the flags):
//! `FEJER_SEED`, `FEJER_OUT`, `FEJER_THREADS`.
//!
//! Exit codes: 0 success; 1 a configured acceptance threshold failed (the
//! report is still written); 2 input or validation error.

mod artifact;
mod clt;
mod config;
mod diagrams;
mod fit;
mod kernels;
mod polytope;
mod szego;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use artifact::{RunDir, RunStatus};
use config::ExperimentConfig;

#[derive(Parser)]
#[command(
    name = "fejer",
    version,
    about = "Spectral-domain limit theory: trace limits, power counting, diagram cumulants, \
             CLT replica experiments, and minimum-contrast estimation"
)]
struct Cli {
    /// TOML experiment file (see the config schema in the repository).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for stochastic commands; overrides FEJER_SEED and the
    /// config's `seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parent directory for run outputs; overrides FEJER_OUT (default runs/).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for replica-level parallelism; overrides
    /// FEJER_THREADS (default: all cores). Thread count never changes the
    /// output bytes.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Trace-limit convergence ladder (CSV per T).
    Szego,
    /// Power-counting membership, vertices, growth exponents (JSON).
    Polytope,
    /// Replica CLT experiment for quadratic forms and Appell sums.
    Clt,
    /// Whittle/Ibragimov minimum-contrast estimation.
    Fit,
    /// Diagram enumeration dump.
    Diagrams,
    /// Window-kernel norm and concentration diagnostics.
    Kernels,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Szego => "szego",
            Command::Polytope => "polytope",
            Command::Clt => "clt",
            Command::Fit => "fit",
            Command::Diagrams => "diagrams",
            Command::Kernels => "kernels",
        }
    }
}

fn env_parse<T: std::str::FromStr>(name: &str) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    match std::env::var(name) {
        Ok(v) => {
            let parsed = v.parse::<T>().map_err(|e| anyhow::anyhow!("{name}={v:?}: {e}"))?;
            Ok(Some(parsed))
        }
        Err(_) => Ok(None),
    }
}

fn real_main() -> Result<bool> {
    let cli = Cli::parse();
    let command = cli.command;

    let config_path = match &cli.config {
        Some(p) => p.clone(),
        None => bail!("--config is required: every command reads one experiment file"),
    };
    let config_bytes = std::fs::read(&config_path)
        .with_context(|| format!("reading config {}", config_path.display()))?;
    let config_text = String::from_utf8(config_bytes.clone())
        .with_context(|| format!("config {} is not UTF-8", config_path.display()))?;
    let cfg = ExperimentConfig::parse(&config_text)
        .with_context(|| format!("config {}", config_path.display()))?;

    let seed = match cli.seed {
        Some(s) => Some(s),
        None => env_parse::<u64>("FEJER_SEED")?.or(cfg.seed),
    };
    let out_parent = cli
        .out
        .or_else(|| std::env::var("FEJER_OUT").ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    let threads = match cli.threads {
        Some(t) => t,
        None => env_parse::<usize>("FEJER_THREADS")?.unwrap_or(0),
    };
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("configuring the thread pool")?;
    }

    // validate the section before creating any artifacts
    macro_rules! section {
        ($field:ident) => {
            cfg.$field.as_ref().with_context(|| {
                format!("config {} has no [{}] section", config_path.display(), command.name())
            })?
        };
    }

    let mut run = RunDir::create(&out_parent, command.name(), &config_bytes, seed, threads)?;
    let ok = match command {
        Command::Szego => szego::run(section!(szego), &mut run)?,
        Command::Polytope => polytope::run(section!(polytope), &mut run)?,
        Command::Clt => clt::run(section!(clt), &mut run, seed)?,
        Command::Fit => fit::run(section!(fit), &mut run, seed)?,
        Command::Diagrams => diagrams::run(section!(diagrams), &mut run)?,
        Command::Kernels => kernels::run(section!(kernels), &mut run)?,
    };
    let dir = run.finish(if ok { RunStatus::Ok } else { RunStatus::ThresholdFailure })?;
    println!("outputs: {}", dir.display());
    Ok(ok)
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
