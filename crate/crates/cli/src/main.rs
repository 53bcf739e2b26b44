//! Command-line front end: validate, solve, develop and render circle patterns.

mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use run::{run, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Validate,
    Solve,
    Develop,
    Ideal,
    Selfcheck,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Newton,
    Flow,
    Continuation,
}

#[derive(Debug, Parser)]
#[command(name = "hypcircle", version, about = "Hyperbolic circle patterns on closed surfaces of genus > 1")]
struct Cli {
    /// Mesh document, or a solve report for `develop`.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    command: Command,
    #[arg(long, value_enum, default_value = "newton")]
    strategy: StrategyArg,
    /// Residual tolerance on max |k|.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Largest vertex set enumerated for blocking curves.
    #[arg(long, default_value_t = hypcircle::conditions::DEFAULT_SIZE_CAP)]
    size_cap: usize,
    /// Comma separated, strictly decreasing.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.025, 0.0125])]
    eps_schedule: Vec<f64>,
    /// Report path; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Seeds the random start radii of `solve`/`develop` and the `selfcheck` samples.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = RunConfig {
        input: cli.input,
        command: cli.command,
        strategy: cli.strategy,
        tol: cli.tol,
        size_cap: cli.size_cap,
        eps_schedule: cli.eps_schedule,
        out: cli.out,
        svg: cli.svg,
        seed: cli.seed,
    };
    match run(&config) {
        Ok(status) => ExitCode::from(status.code()),
        Err(failure) => {
            eprintln!("{}", failure.to_json());
            ExitCode::from(failure.code())
        }
    }
}
