//! `qbm`: evolve Gaussian states under white-noise decoherence, run the
//! pointer-state sieve, cat and dielectric calculations, and check the
//! closed forms against brute-force quadrature.

mod cmd;
mod config;
mod context;
mod failure;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::{Format, RunConfig};
use crate::context::{Context, ParamArgs};

#[derive(Debug, Parser)]
#[command(name = "qbm", version, about = "Quantum Brownian motion decoherence simulations")]
struct Cli {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory [default: $QBM_OUT_DIR, else the current directory].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads for scans (output does not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Table format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    #[command(flatten)]
    params: ParamArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a squeezed or coherent state over a list of times.
    Evolve(cmd::evolve::Args),
    /// Find the least-entropy initial squeezing at each time.
    Sieve(cmd::sieve::Args),
    /// Cat-state visibility against the number of periods.
    Cat(cmd::cat::Args),
    /// Density-matrix grids of a cat and of |0>+|1> before and after noise.
    Fig1(cmd::fig1::Args),
    /// Spectral density and dielectric function of a molecular medium.
    Medium(cmd::medium::Args),
    /// Compare the closed-form evolution with numeric propagation.
    OracleCheck(cmd::oracle::Args),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // usage errors are configuration errors; help and version are not
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("qbm: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), failure::Failure> {
    let cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(failure::Failure::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| failure::Failure::Config(format!("--jobs: {e}")))?;
    }
    let ctx = Context {
        cfg,
        out: cli.out,
        format: cli.format,
        params: cli.params,
    };
    match cli.command {
        Command::Evolve(a) => cmd::evolve::run(&ctx, &a),
        Command::Sieve(a) => cmd::sieve::run(&ctx, &a),
        Command::Cat(a) => cmd::cat::run(&ctx, &a),
        Command::Fig1(a) => cmd::fig1::run(&ctx, &a),
        Command::Medium(a) => cmd::medium::run(&ctx, &a),
        Command::OracleCheck(a) => cmd::oracle::run(&ctx, &a),
    }
}
