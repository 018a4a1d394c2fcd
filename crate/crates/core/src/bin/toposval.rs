//! Runs a scenario file and reports the results.
//!
//! Exit codes: 0 when every task passes (a Kochen-Specker exhaustion
//! certificate counts as a pass), 1 when some task found violations or
//! failed, 2 when the scenario could not be parsed or resolved.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use toposval::scenario::{run_scenario, Mode, RunOptions};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Exact,
    Numeric,
}

#[derive(Debug, Parser)]
#[command(name = "toposval", version, about = "Run a toposval scenario file")]
struct Args {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Override the scenario's arithmetic mode.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Tolerance for numeric mode.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Drop multiples of the identity from operator families.
    #[arg(long)]
    strip_units: bool,
    /// Run only tasks with this kind or name.
    #[arg(long)]
    task: Option<String>,
    /// Write the JSON report here (`-` for standard output).
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let options = RunOptions {
        mode: args.mode.map(|m| match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Numeric => Mode::Numeric,
        }),
        epsilon: args.epsilon,
        strip_units: args.strip_units,
        task_filter: args.task,
    };
    let report = match run_scenario(&args.scenario, &options) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {}: {e}", args.scenario.display());
            return ExitCode::from(2);
        }
    };
    match args.output.as_deref() {
        Some(p) if p.as_os_str() == "-" => print!("{}", report.to_json()),
        Some(p) => {
            if let Err(e) = std::fs::write(p, report.to_json()) {
                eprintln!("error: cannot write {}: {e}", p.display());
                return ExitCode::from(2);
            }
            print!("{}", report.summary());
        }
        None => print!("{}", report.summary()),
    }
    ExitCode::from(report.exit_code() as u8)
}
