use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use jetinv::report::{analyze_batch, error_kind, parse_problems, render, Options, Outcome};

/// Point invariants of ODEs and Veronese webs from JSON problem files.
#[derive(Debug, Parser)]
#[command(name = "analyze", version)]
struct Args {
    /// Problem file: {"problems": [...]}, an array, or a single problem.
    input: PathBuf,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized zero tests and parameter sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Sample points per zero test.
    #[arg(long)]
    trials: Option<u32>,
    /// Relative tolerance for floating-point evaluations.
    #[arg(long)]
    tolerance: Option<f64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let text = match std::fs::read_to_string(&args.input) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.input.display());
            return ExitCode::from(1);
        }
    };
    let problems = match parse_problems(&text) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let cli = Options {
        trials: args.trials,
        tolerance: args.tolerance,
        seed: args.seed,
    };
    let outcomes = analyze_batch(&problems, &cli);
    let rendered = render(&outcomes);
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{rendered}"),
    }
    for o in &outcomes {
        eprintln!("{}", o.summary());
    }
    let code = outcomes
        .iter()
        .map(|o| match o {
            Outcome::Report(_) => 0,
            Outcome::Failed { error, .. } if error_kind(error) == "internal" => 2,
            Outcome::Failed { .. } => 1,
        })
        .max()
        .unwrap_or(0);
    ExitCode::from(code)
}
