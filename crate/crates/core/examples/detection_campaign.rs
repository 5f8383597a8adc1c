//! Detection rate, rounds to detection and leakage for T = 1..5 against a
//! random-basis intercept-resend repeater.
//!
//! `cargo run --release --example detection_campaign -- [trials] [seed]`

use qauth::experiments::{emit, run_experiment, ExperimentConfig, ExperimentKind, OutputFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let trials = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200);
    let seed = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2024);

    let mut cfg = ExperimentConfig::new(ExperimentKind::Fig2Success);
    cfg.trials = trials;
    cfg.master_seed = seed;
    let report = run_experiment(&cfg)?;
    emit(&report, OutputFormat::Table, &mut std::io::stdout())?;

    let detected: usize = report.records().iter().filter(|r| r.detected).count();
    println!("{detected} of {} sessions caught", report.records().len());
    Ok(())
}
