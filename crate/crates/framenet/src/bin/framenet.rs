use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use framenet::cli::{load_config, run, Command, ExperimentConfig};

/// Operator learning experiments: rates, Darcy data, constructive networks,
/// training and rate studies.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    command: Command,
    /// JSON experiment config; every block is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory receiving CSV/JSON artifacts.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides every seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(k) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = args
        .config
        .as_deref()
        .map_or_else(|| Ok(ExperimentConfig::default()), load_config)
        .map(|cfg| match args.seed {
            Some(seed) => cfg.with_seed(seed),
            None => cfg,
        })
        .and_then(|cfg| run(args.command, &cfg, &args.out));
    match result {
        Ok(report) => {
            print!("{report}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input() { 1 } else { 2 })
        }
    }
}
