//! The four-bit key walk-through: K = 1101, T = 2, one honest repeater.
//!
//! Prints the endpoint trace as JSON lines.

use qauth::netsim::{run_trial_detailed, TrialOptions};
use qauth::protocol::trace_to_json_lines;
use qauth::{KeyMaterial, RepeaterBehavior, ScheduleConfig, SessionConfig, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let key: KeyMaterial = "1101".parse()?;
    let schedule = ScheduleConfig::new(2, 0)?;
    // R1 = 3 and R2 = 1, so four data qubits take exactly two rounds.
    let session = SessionConfig::new(key, schedule, 4)?;
    let outcome = run_trial_detailed(&Topology::chain(1), RepeaterBehavior::Honest, &session, 7, TrialOptions::default())?;

    print!("{}", trace_to_json_lines(&outcome.trace));
    eprintln!(
        "rounds={} data={} auth={} completed={}",
        outcome.record.rounds_completed, outcome.record.data_qubits_delivered, outcome.record.auth_qubits_sent, outcome.record.completed
    );
    Ok(())
}
