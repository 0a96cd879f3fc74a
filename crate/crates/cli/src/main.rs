//! `tscl-coop`: simulate coalition tables, compute values and interaction
//! matrices, derive curricula, run teachers and summarize the runs.

mod commands;
mod config;
mod error;
mod output;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tscl_coop::solution::MatrixMethod;
use tscl_coop::ValueMethod;

use commands::{CurriculumArgs, Globals, Mechanism};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "tscl-coop",
    version,
    about = "Cooperative-game analysis of curriculum learning"
)]
struct Cli {
    /// Experiment config (TOML); required by `simulate` and `teach`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output root; artifacts go to `<out>/<experiment>/`.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overwrite existing artifacts.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train on every coalition and write one table per evaluation target.
    Simulate,
    /// Shapley or Nowak & Radzik values of a table.
    Values {
        #[arg(long)]
        table: PathBuf,
        /// shapley-exact, shapley-mc, nr-exact, nr-literal or nr-mc.
        #[arg(long, value_parser = parse_value_method)]
        method: ValueMethod,
        /// Sampled orderings for the Monte-Carlo methods.
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
    },
    /// Pairwise interaction matrix of a table.
    Interactions {
        #[arg(long)]
        table: PathBuf,
        /// shapley-vpop or nr-vpop; defaults to the one matching the table.
        #[arg(long, value_parser = parse_matrix_method)]
        method: Option<MatrixMethod>,
    },
    /// Turn a value file into a teacher policy or schedule.
    Curriculum {
        #[arg(long)]
        values: PathBuf,
        #[arg(long, value_enum)]
        mechanism: MechanismArg,
        #[arg(long, default_value_t = 1.0)]
        temperature: f64,
        /// Interaction budget of an ordered schedule.
        #[arg(long)]
        budget: Option<usize>,
        /// Rank units from lowest to highest value.
        #[arg(long)]
        ascending: bool,
    },
    /// Run every configured teacher for every seed.
    Teach,
    /// Learning curves and final-metric table from run logs.
    Report {
        /// Run log files or directories holding them.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MechanismArg {
    Boltzmann,
    Euclidean,
    Ordered,
}

fn parse_value_method(s: &str) -> Result<ValueMethod, String> {
    s.parse()
}

fn parse_matrix_method(s: &str) -> Result<MatrixMethod, String> {
    s.parse()
}

fn run(cli: Cli) -> Result<Vec<PathBuf>, CliError> {
    let g = Globals {
        config: cli.config,
        seed: cli.seed,
        out: cli.out,
        force: cli.force,
    };
    match cli.command {
        Command::Simulate => commands::simulate(&g),
        Command::Values {
            table,
            method,
            samples,
        } => commands::values(&g, &table, method, samples),
        Command::Interactions { table, method } => commands::interactions(&g, &table, method),
        Command::Curriculum {
            values,
            mechanism,
            temperature,
            budget,
            ascending,
        } => {
            let mechanism = match mechanism {
                MechanismArg::Boltzmann => Mechanism::Boltzmann,
                MechanismArg::Euclidean => Mechanism::Euclidean,
                MechanismArg::Ordered => Mechanism::Ordered,
            };
            let args = CurriculumArgs {
                mechanism,
                temperature,
                budget,
                ascending,
            };
            commands::curriculum(&g, &values, &args)
        }
        Command::Teach => commands::teach(&g),
        Command::Report { runs } => report::report(&g.out, &runs, g.force),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let kind = match e {
                CliError::Validation(_) => "invalid input",
                CliError::Runtime(_) => "failed",
            };
            eprintln!("error ({kind}): {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
