//! Runs a campaign described by a JSON config, the same format the CLI takes
//! with `--config`. Without an argument a built-in scenario is used: a
//! five-repeater chain, the second repeater always measuring in Z, mutual
//! authentication every round.

use qauth::experiments::{emit, run_experiment, ExperimentConfig};

const BUILT_IN: &str = r#"{
  "experiment": "custom",
  "transfer_lengths": [2, 4],
  "trials": 100,
  "data_target": 60,
  "adversary": { "kind": "intercept_resend", "policy": "always_z" },
  "topology": {
    "nodes": ["alice", "r1", "r2", "r3", "r4", "r5", "bob"],
    "edges": [["alice","r1"],["r1","r2"],["r2","r3"],["r3","r4"],["r4","r5"],["r5","bob"]],
    "path": ["alice", "r1", "r2", "r3", "r4", "r5", "bob"]
  },
  "malicious_node": "r2",
  "reverse_auth": true,
  "payload": { "kind": "haar_random" },
  "format": "table"
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => BUILT_IN.to_string(),
    };
    let cfg: ExperimentConfig = serde_json::from_str(&text)?;
    let report = run_experiment(&cfg)?;
    emit(&report, cfg.format, &mut std::io::stdout())?;
    Ok(())
}
