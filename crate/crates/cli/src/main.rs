//! `nusample <command> --config <file.json> --out <dir> [--threads N] [--seed S]`
//!
//! Exit status: 0 when every asserted claim holds, 1 on a violated claim or
//! numerical failure, 2 on usage or configuration errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use output::Output;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
}

#[derive(Parser)]
#[command(name = "nusample", version, about = "Balayage sampling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Experiment config (JSON, "schema": 1).
    #[arg(long)]
    config: PathBuf,
    /// Output directory for reports and CSV tables.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "NUSAMPLE_THREADS")]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Covering check of Λ* translates and frame bounds for PW_{ρΛ}.
    Covering(Common),
    /// Frame bounds and a Rayleigh-quotient sample.
    FrameBounds(Common),
    /// Conjugate-gradient reconstruction from samples.
    Reconstruct(Common),
    /// Fundamental identity residuals of the balayage expansion.
    Identity(Common),
    /// STFT identities and the explicit PW frame bound.
    Stft(Common),
    /// Gabor reconstruction on a phase-space lattice.
    Gabor(Common),
    /// Inequality chain for a pseudo-differential operator.
    Psido(Common),
}

fn run<T: DeserializeOwned>(
    name: &'static str,
    common: &Common,
    body: impl FnOnce(&config::Loaded<T>, &Output) -> Result<bool, CliError>,
) -> Result<bool, CliError> {
    let started = SystemTime::now();
    let loaded = config::load::<T>(&common.config, common.seed)?;
    let out = Output::new(common.out.clone(), name, loaded.experiment.clone(), loaded.hash.clone(), loaded.seed)?;
    log::info!("{name}: experiment {} (config {})", loaded.experiment, &loaded.hash[..12]);
    let ok = body(&loaded, &out)?;
    out.metadata(started, rayon::current_num_threads())?;
    Ok(ok)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let common = match &cli.command {
        Command::Covering(c)
        | Command::FrameBounds(c)
        | Command::Reconstruct(c)
        | Command::Identity(c)
        | Command::Stft(c)
        | Command::Gabor(c)
        | Command::Psido(c) => c,
    };
    if let Some(n) = common.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Covering(c) => run("covering", c, commands::covering),
        Command::FrameBounds(c) => run("frame-bounds", c, commands::frame_bounds),
        Command::Reconstruct(c) => run("reconstruct", c, commands::reconstruct),
        Command::Identity(c) => run("identity", c, commands::identity),
        Command::Stft(c) => run("stft", c, commands::stft_checks),
        Command::Gabor(c) => run("gabor", c, commands::gabor),
        Command::Psido(c) => run("psido", c, commands::psido),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("claim violated; see report.json");
            ExitCode::from(1)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
    }
}
