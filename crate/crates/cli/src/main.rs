//! `qii`: integrated information of quantum states and Φ-driven collapse runs.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::Command;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "qii", version, about = "Quantum integrated information and collapse races")]
struct Args {
    /// qii, profile, evolve or race; defaults to the config's `command`
    command: Option<Command>,
    /// experiment JSON
    #[arg(long)]
    config: PathBuf,
    /// dotted.path=value, applied before validation; repeatable
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// takes precedence over output.path; defaults to the working directory
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// worker threads, 0 = one per core
    #[arg(long, default_value_t = 0)]
    threads: usize,
}

fn run(args: Args) -> Result<(), CliError> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let config = config::load(&text, &args.overrides)?;
    let command = match (args.command, config.command) {
        (Some(a), Some(c)) if a != c => {
            return Err(CliError::Config(format!(
                "command {a:?} on the command line, {c:?} in the config"
            )))
        }
        (Some(a), _) => a,
        (None, Some(c)) => c,
        (None, None) => return Err(CliError::Config("no command given".into())),
    };
    config.integrator.validate()?;
    if args.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let out_dir = args
        .output_dir
        .or_else(|| config.output.path.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    commands::run(command, &config, &out_dir)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qii: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
