//! Runs a scenario file through the library API and prints the summary.
//!
//! `cargo run --example run_scenario -- scenarios/c3.json`

use std::path::PathBuf;

use toposval::scenario::{run_scenario, RunOptions};

fn main() {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios/q3.json"));
    match run_scenario(&path, &RunOptions::default()) {
        Ok(report) => {
            print!("{}", report.summary());
            std::process::exit(report.exit_code());
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            std::process::exit(2);
        }
    }
}
