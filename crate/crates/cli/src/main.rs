use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qmeas_cli::{emit, parse_config, run, CliError, ExperimentConfig, Format, RunOptions};

#[derive(Parser)]
#[command(name = "qmeas", version, about = "Generalized quantum measurement experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment and emit its result table.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tolerance for the experiment's asserted checks.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Parse and validate a config without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text)
}

fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            config,
            format,
            out,
            tol,
        } => {
            if let Some(t) = tol {
                if !t.is_finite() || t < 0.0 {
                    return Err(CliError::config("--tol", "must be a finite nonnegative number"));
                }
            }
            let config = load(&config)?;
            let output = run(&config, RunOptions { tol })?;
            emit(&output.table, format, out.as_deref())?;
            let failed = output.failed_checks();
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::ChecksFailed(failed))
            }
        }
        Command::Validate { config } => {
            let parsed = load(&config)?;
            println!("{}: valid {} config", config.display(), parsed.kind());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors share the config exit code.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qmeas: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
