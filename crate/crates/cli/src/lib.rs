//! Library side of the `bakerlab` binary: the argument surface and command
//! dispatch, exposed so integration tests can reuse the readers.

pub mod commands;
pub mod config;
pub mod output;
pub mod validate;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use config::{parse_config_file, FileConfig, RunArgs, RunConfig};
use std::ffi::OsString;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "bakerlab",
    version,
    about = "Quantum baker's map experiments: entropy, fidelity, and hypersensitivity"
)]
pub struct Cli {
    /// Flat `key = value` config file; flags override its entries.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Directory that receives the output artifacts.
    #[arg(long = "out-dir", global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Worker thread cap (default: all cores, or BAKERLAB_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Entropy of the averaged history ensemble vs time (CSV + gnuplot).
    Entropy(RunArgs),
    /// Fidelity between the unperturbed and the always-perturbed trajectory.
    Fidelity(RunArgs),
    /// Information/entropy trade-off of one evolved ensemble (JSON + CSV).
    Tradeoff(RunArgs),
    /// Hypersensitivity parameter s vs time for each grouping method.
    #[command(name = "s-series")]
    SSeries(RunArgs),
    /// Closed-form baseline curves.
    Analytic {
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        curve: commands::AnalyticArgs,
    },
    /// Fast oracle self-checks; exits nonzero on any failure.
    Validate,
}

pub fn run<I, T>(argv: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::parse_from(argv);
    let file: Option<FileConfig> = match &cli.config {
        Some(path) => Some(parse_config_file(path)?),
        None => None,
    };

    let default_args = RunArgs::default();
    let run_args = match &cli.cmd {
        Cmd::Entropy(a) | Cmd::Fidelity(a) | Cmd::Tradeoff(a) | Cmd::SSeries(a) => a,
        Cmd::Analytic { run, .. } => run,
        Cmd::Validate => &default_args,
    };
    let cfg = RunConfig::resolve(file.as_ref(), run_args, cli.out_dir.as_ref(), cli.threads)?;
    init_threads(cfg.threads)?;

    match &cli.cmd {
        Cmd::Entropy(_) => commands::entropy(&cfg),
        Cmd::Fidelity(_) => commands::fidelity(&cfg),
        Cmd::Tradeoff(_) => commands::tradeoff(&cfg),
        Cmd::SSeries(_) => commands::s_series_cmd(&cfg),
        Cmd::Analytic { curve, .. } => commands::analytic(&cfg, curve),
        Cmd::Validate => validate::validate(),
    }
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    let n = match threads {
        Some(n) => Some(n),
        None => match std::env::var("BAKERLAB_THREADS") {
            Ok(v) => Some(v.parse().context("parsing BAKERLAB_THREADS")?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("initializing the worker pool")?;
    }
    Ok(())
}
