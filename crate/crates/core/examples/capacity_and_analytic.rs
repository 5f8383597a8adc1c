//! Key capacity for a 1024-bit key, and the closed-form detection tables.

use qauth::experiments::{analytic_detection, capacity_report};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>3} {:>7} {:>7}", "T", "rounds", "qubits");
    for row in capacity_report(1024, &[1, 2, 3, 4, 5, 6, 8])? {
        println!("{:>3} {:>7} {:>7}", row.transfer_length, row.rounds, row.capacity);
    }
    println!();
    println!("{:>6} {:>10} {:>10}", "rounds", "p=1/2", "p=1/4");
    for n in 1..=10 {
        let a = analytic_detection(n);
        println!("{:>6} {:>10.4} {:>10.4}", a.rounds, a.half_per_round, a.quarter_per_round);
    }
    Ok(())
}
