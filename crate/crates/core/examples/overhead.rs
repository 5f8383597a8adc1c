//! Authentication overhead on an honest path, 100 data qubits per session.

use qauth::experiments::{emit, run_experiment, ExperimentConfig, ExperimentKind, OutputFormat};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::Fig5Overhead);
    cfg.trials = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(200);
    let report = run_experiment(&cfg)?;
    emit(&report, OutputFormat::Csv, &mut std::io::stdout())?;
    for row in report.metrics() {
        let expected = expected_overhead(row.transfer_length, 100);
        println!("T={} measured {:.4} uniform-key expectation {expected:.4}", row.transfer_length, row.overhead.unwrap_or(f64::NAN));
    }
    Ok(())
}

/// Mean rounds needed to deliver `target` qubits with uniform windows in
/// `0..2^T`, counting a closing round for a partial last window.
fn expected_overhead(t: u32, target: usize) -> f64 {
    let max = (1usize << t) - 1;
    let p = 1.0 / (max + 1) as f64;
    // e[n]: expected rounds to deliver n more qubits.
    let mut e = vec![0.0; target + 1];
    for n in 1..=target {
        // Window 0 repeats the state; solve e = 1 + p*e + sum.
        let rest: f64 = (1..=max).map(|r| if r >= n { 0.0 } else { e[n - r] }).sum();
        e[n] = (1.0 + p * rest) / (1.0 - p);
    }
    e[target] / target as f64
}
