//! `qwalk` command-line runner.
//!
//! Exit codes: 0 on success, 1 on I/O failure, 2 on an invalid config, 3 when
//! a numerical filter or consistency check fails.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qwalk::experiments::{run_and_write, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(name = "qwalk", version, about = "Quantum walk experiments on Z")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve the initial state and record position laws.
    Evolve(RunArgs),
    /// Compare the law of X_t/t with the predicted limit law.
    LimitCompare(RunArgs),
    /// Cauchy probes of the finite-time wave operators.
    WaveProbe(RunArgs),
    /// Bound states of the truncated evolution and the point-mass weight.
    Spectrum(RunArgs),
    /// Trace-norm partial sums of C - C0.
    TraceNorm(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; falls back to `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn run(kind: Experiment, args: &RunArgs) -> qwalk::Result<PathBuf> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| {
            qwalk::Error::Config("no output directory: pass --out or set output_dir".into())
        })?;
    run_and_write(kind, &cfg, &out)?;
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Evolve(a) => (Experiment::Evolve, a),
        Command::LimitCompare(a) => (Experiment::LimitCompare, a),
        Command::WaveProbe(a) => (Experiment::WaveProbe, a),
        Command::Spectrum(a) => (Experiment::Spectrum, a),
        Command::TraceNorm(a) => (Experiment::TraceNorm, a),
    };
    match run(kind, args) {
        Ok(out) => {
            println!("wrote {}", out.join("summary.json").display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
