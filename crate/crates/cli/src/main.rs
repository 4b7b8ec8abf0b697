use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use riscorr_cli::{
    init_thread_pool, parse_config, run_experiment, CliError, Experiment, Mode, RunOptions,
};

/// Sizing, beam-sweep, grouping, power and rate experiments for RIS deployments.
#[derive(Debug, Parser)]
#[command(name = "riscorr", version)]
struct Args {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,

    /// Scenario file (TOML).
    #[arg(long)]
    config: PathBuf,

    /// Directory receiving the CSV files.
    #[arg(long)]
    out: PathBuf,

    /// Overrides the seed from the configuration.
    #[arg(long)]
    seed: Option<u64>,

    /// Restricts the run to one gain margin.
    #[arg(long, value_parser = ["0", "3", "6"])]
    margin_db: Option<String>,

    /// Restricts the run to one design.
    #[arg(long, value_enum)]
    mode: Option<Mode>,
}

fn run(args: &Args) -> Result<Vec<PathBuf>, CliError> {
    init_thread_pool()?;
    let config = parse_config(&args.config)?;
    let opts = RunOptions {
        seed: args.seed,
        margin_db: args
            .margin_db
            .as_deref()
            .map(|m| m.parse().expect("restricted by clap")),
        mode: args.mode,
    };
    run_experiment(args.experiment, &config, &opts, &args.out)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("riscorr: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
