use std::path::PathBuf;
use std::process::ExitCode;

use blowup_cli::reproduce::{reproduce, SCENARIOS};
use blowup_cli::{run, CliError, ExperimentConfig, RunReport};
use clap::{Parser, Subcommand};

/// Self-similar blow-up experiments for u_t = x^{1-N}(x^{N-1} u^σ u_x)_x + u^β.
#[derive(Debug, Parser)]
#[command(name = "blowup", version)]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the experiment described by a key = value config file.
    Run {
        config: PathBuf,
    },
    /// Run one of the pinned experiment sets.
    Reproduce {
        #[arg(value_name = "SCENARIO", help = format!("one of: {}", SCENARIOS.join(", ")))]
        name: String,
        /// Output directory (default: out/<SCENARIO>).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn execute(cli: Cli) -> Result<Vec<RunReport>, CliError> {
    match cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
            let base = config.parent().map(PathBuf::from).unwrap_or_default();
            let cfg = ExperimentConfig::parse(&text, &base)?;
            Ok(vec![run(&cfg)?])
        }
        Command::Reproduce { name, output } => {
            let dir = output.unwrap_or_else(|| PathBuf::from("out").join(&name));
            reproduce(&name, &dir)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).parse_default_env().init();
    match execute(cli) {
        Ok(reports) => {
            let mut code = 0;
            for r in &reports {
                let status = if r.exit_code == 0 { "ok" } else { "solver failure" };
                println!("{status}: {}", r.summary.display());
                code = code.max(r.exit_code);
            }
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("blowup: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
