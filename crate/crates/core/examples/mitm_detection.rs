//! A single session through a malicious middle repeater. Shows what the
//! interceptor measured and where the endpoints noticed.

use qauth::netsim::{run_trial_detailed, TrialOptions};
use qauth::protocol::{trace_to_json_lines, TraceEvent};
use qauth::{BasisPolicy, KeyMaterial, RepeaterBehavior, ScheduleConfig, SessionConfig, Topology};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let key: KeyMaterial = "0x9f3a61c2d47e8b05:64".parse()?;
    let session = SessionConfig::new(key, ScheduleConfig::new(3, 0)?, 150)?;
    let eve = RepeaterBehavior::InterceptResend { policy: BasisPolicy::RandomZx };
    let outcome = run_trial_detailed(&Topology::chain(3), eve, &session, seed, TrialOptions::default())?;

    println!("-- interceptor log");
    print!("{}", outcome.intercepts.to_json_lines());
    println!("-- verdicts");
    let verdicts: Vec<TraceEvent> = outcome.trace.iter().filter(|e| matches!(e, TraceEvent::Verdict(_) | TraceEvent::Terminated { .. })).cloned().collect();
    print!("{}", trace_to_json_lines(&verdicts));

    let r = &outcome.record;
    match r.rounds_to_detect {
        Some(n) => println!("detected in round {n} after {} data qubits", r.data_qubits_delivered),
        None => println!("not detected; {} data qubits delivered", r.data_qubits_delivered),
    }
    println!(
        "data qubits compared {} altered {}",
        outcome.integrity.compared, outcome.integrity.altered
    );
    Ok(())
}
