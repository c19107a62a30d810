use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use cylobst_cli::{parse_config, run, Problem};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Poisson,
    Rearrangement,
    Obstacle,
    Compare,
    Counterexample,
    Verify,
}

impl From<Command> for Problem {
    fn from(c: Command) -> Self {
        match c {
            Command::Poisson => Problem::Poisson,
            Command::Rearrangement => Problem::Rearrangement,
            Command::Obstacle => Problem::Obstacle,
            Command::Compare => Problem::Compare,
            Command::Counterexample => Problem::Counterexample,
            Command::Verify => Problem::Verify,
        }
    }
}

/// Solvers and checks for the rearrangement and nonlocal obstacle problems on a cylinder.
#[derive(Debug, Parser)]
#[command(name = "cylobst", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match std::fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    // the command line wins over the file
    cfg.problem = cli.command.into();
    let out = cli
        .out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("cylobst-out"));
    match run(&cfg, &out) {
        Ok(outcome) => {
            for st in &outcome.stages {
                println!("{} {}", if st.passed { "PASS" } else { "FAIL" }, st.name);
            }
            println!("artifacts in {}", out.display());
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
