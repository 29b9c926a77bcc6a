use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;
use susy_sigma_cli::{error_json, run, Command};

/// Evaluate, check, solve and diagnose the discrete sigma model.
#[derive(Parser)]
#[command(name = "susy-sigma", version)]
struct Args {
    command: Command,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Directory receiving the artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args.command, &args.config, &args.out, args.seed) {
        Ok(o) => {
            println!("{}", o.summary);
            if o.success {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(1)
        }
    }
}
