use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qrf_cli::presets::{preset, suite_preset};
use qrf_cli::{init_threads, run_experiment, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "qrf", version, about = "Reference-frame experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run { config: PathBuf },
    /// Regenerate the data behind one figure (fig3 … fig9).
    Figure {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suite.
    Suite {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<ExperimentConfig, CliError> {
    init_threads()?;
    let config = match cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", config.display())))?;
            ExperimentConfig::parse(&text)?
        }
        Command::Figure { name, out } => {
            let c = preset(&name)?;
            match out {
                Some(dir) => c.with_output_dir(dir),
                None => c,
            }
        }
        Command::Suite { seed, out } => {
            let c = suite_preset(seed);
            match out {
                Some(dir) => c.with_output_dir(dir),
                None => c,
            }
        }
    };
    run_experiment(&config)?;
    Ok(config)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(config) => {
            eprintln!("wrote {}", config.output_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qrf: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
