//! Command-line driver: loads a scenario, runs one solver verb, and writes
//! a CSV table (optionally mirrored as JSON).

pub mod commands;
pub mod error;
pub mod scenario;
pub mod table;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub use error::CliError;
pub use scenario::{Overrides, Scenario};
pub use table::{Cell, Table};

#[derive(Debug, Parser)]
#[command(name = "prompt-pricing", version, about = "Prompt pricing scenarios")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Users' model choice and prompt count across an ambiguity grid.
    UserStrategy(CommonArgs),
    /// Closed-form platform prices for users sharing one ambiguity level.
    HomogPrice(CommonArgs),
    /// Two-model price search for an ambiguity distribution.
    Opp(CommonArgs),
    /// Price search against the proportional baselines over a sweep of
    /// the distribution's lower end.
    Compare(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the table as JSON, next to `--out` with a `.json`
    /// extension, or to standard output instead of CSV.
    #[arg(long)]
    pub json: bool,
    /// Add exhaustive price-lattice results (`opp`, `compare`).
    #[arg(long)]
    pub oracle: bool,
    /// Per-step trace of the low-model price grid (`opp`).
    #[arg(long)]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub nodes: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(table: &Table, args: &CommonArgs) -> Result<(), CliError> {
    match &args.out {
        Some(path) => {
            write_file(path, &table.to_csv())?;
            if args.json {
                write_file(&path.with_extension("json"), &table.to_json())?;
            }
            Ok(())
        }
        None => {
            let bytes = if args.json {
                table.to_json()
            } else {
                table.to_csv()
            };
            match std::io::stdout().write_all(&bytes) {
                // a closed pipe (`| head`) is not a failure
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                }),
            }
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let (args, verb) = match &cli.command {
        Command::UserStrategy(a) => (a, "user-strategy"),
        Command::HomogPrice(a) => (a, "homog-price"),
        Command::Opp(a) => (a, "opp"),
        Command::Compare(a) => (a, "compare"),
    };
    if args.trace.is_some() && verb != "opp" {
        return Err(CliError::Usage(format!(
            "--trace applies only to `opp`, not `{verb}`"
        )));
    }
    if args.oracle && !matches!(verb, "opp" | "compare") {
        return Err(CliError::Usage(format!(
            "--oracle applies only to `opp` and `compare`, not `{verb}`"
        )));
    }
    let overrides = Overrides {
        nodes: args.nodes,
        alpha: args.alpha,
    };
    let scenario = Scenario::load(&args.scenario, overrides)?;
    let table = match &cli.command {
        Command::UserStrategy(_) => commands::user_strategy(&scenario)?,
        Command::HomogPrice(_) => commands::homog_price(&scenario)?,
        Command::Opp(_) => {
            let run = commands::opp(&scenario, args.oracle)?;
            if let Some(path) = &args.trace {
                write_file(path, &run.trace.to_csv())?;
            }
            run.summary
        }
        Command::Compare(_) => commands::compare(&scenario, args.oracle)?,
    };
    emit(&table, args)
}
