mod args;
mod commands;
mod config;
mod failure;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::config::PipelineConfig;
use crate::failure::Failure;

fn run(cli: Cli) -> Result<(), Failure> {
    let mut config = PipelineConfig::load(cli.global.config.as_deref())?;
    if let Some(seed) = cli.global.seed {
        config.seed = seed;
    }
    if let Some(w) = cli.global.workers {
        config.workers = Some(w);
    }
    if let Some(w) = config.workers {
        if w == 0 {
            return Err(Failure::usage("--workers must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::usage(format!("cannot start worker pool: {e}")))?;
    }
    commands::dispatch(cli.command, config)
}

fn main() -> ExitCode {
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
            eprintln!("biomedner: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
