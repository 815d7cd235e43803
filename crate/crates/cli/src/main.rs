mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "ugen", version, about = "Polynomial system solving by u-generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a benchmark system to a JSON file.
    Gen {
        #[command(flatten)]
        family: FamilyArgs,
        /// Seed for random coefficients and data.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a square system and write its solutions.
    Solve {
        #[arg(long, value_enum, default_value_t = SolveMethod::Ugen)]
        method: SolveMethod,
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Equation dropped to form the curve (default: the last one).
        #[arg(long)]
        drop: Option<usize>,
        #[command(flatten)]
        tracker: TrackerArgs,
    },
    /// Run the dropped-equation experiment with both methods.
    Bench {
        #[command(flatten)]
        family: FamilyArgs,
        /// Write the reports as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        tracker: TrackerArgs,
    },
    /// Re-check the residuals of a solution file.
    Verify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        solutions: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum SolveMethod {
    Ugen,
    Regen,
    TotalDegree,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Family {
    Katsura,
    Cyclic,
    Banded,
    Mle,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: Family,
    #[arg(long)]
    n: usize,
    /// Band width of the banded quadrics.
    #[arg(long)]
    k: Option<usize>,
    /// Rank of the likelihood model.
    #[arg(long)]
    r: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct TrackerArgs {
    /// Seed of all random choices (for bench also of the generated system).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    min_step: Option<f64>,
    #[arg(long)]
    max_corr_steps: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    infinity_threshold: Option<f64>,
    /// Eliminate the cone variables once t passes this value.
    #[arg(long)]
    eliminate_after: Option<f64>,
}

/// Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
enum Failure {
    Usage(anyhow::Error),
    Numerical(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let res = match cli.command {
        Command::Gen { family, seed, out } => commands::gen(&family, seed, &out),
        Command::Solve {
            method,
            system,
            out,
            drop,
            tracker,
        } => commands::solve(method, &system, &out, drop, &tracker),
        Command::Bench { family, out, tracker } => commands::bench(&family, out.as_deref(), &tracker),
        Command::Verify {
            system,
            solutions,
            tol,
        } => commands::verify(&system, &solutions, tol),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(e)) => {
            eprintln!("numerical failure: {e:#}");
            ExitCode::from(2)
        }
    }
}
