//! Runs the vulnerable-versus-hardened comparison behind `kga-lab demo` and
//! prints the outcome matrix of each run.
//!
//! cargo run --example demo -- [seed]

use kga_lab::demo::{run_demo, DemoMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(1);
    let report = run_demo(DemoMode::Both, seed)?;
    for run in &report.runs {
        println!(
            "{:?}: {:?} (expectations met: {})",
            run.mode, run.matrix, run.expectations_met
        );
    }
    Ok(())
}
