use std::process::ExitCode;

use clap::Parser;
use qes_cli::args::Cli;
use qes_cli::{commands, config, CliError};

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    match threads {
        None => Ok(()),
        Some(0) => Err(CliError::Invalid("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(format!("cannot start {n} worker threads: {e}"))),
    }
}

fn run() -> Result<(), CliError> {
    let args = config::expand_args(std::env::args_os().collect())?;
    let cli = Cli::try_parse_from(args).unwrap_or_else(|e| e.exit());
    configure_threads(cli.threads)?;
    commands::run(cli.command)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qes: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
