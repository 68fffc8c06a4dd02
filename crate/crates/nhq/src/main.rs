use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nhq::executor::thread_count;
use nhq::{run_scenario, CliError, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(
    name = "nhq",
    version,
    about = "Non-Hermitian open-system dynamics and entropy time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scenario file and write its time series.
    Run {
        config: PathBuf,
        /// Output directory (replaces `output.dir`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Set a dotted key, e.g. `integrator.dt=5e-4`. Repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Check a scenario file without running it.
    Check {
        config: PathBuf,
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run {
            config,
            out,
            overrides,
        } => ScenarioConfig::load(&config, &overrides)
            .and_then(|cfg| run_scenario(cfg, out.as_deref(), thread_count()))
            .map(|(path, rows)| println!("{} ({rows} rows)", path.display())),
        Command::Check { config, overrides } => ScenarioConfig::load(&config, &overrides)
            .and_then(|cfg| nhq::Scenario::prepare(cfg).map(|_| println!("ok"))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(CliError::exit_code(&e) as u8)
        }
    }
}
