//! Quantum identity authentication over entanglement-swapping repeater chains.
//!
//! Alice and Bob share a secret key. The key decides how many data qubits
//! Alice teleports before Bob must prove himself with an authentication
//! qubit, and which of `|0>, |1>, |+>, |->` that qubit carries. A repeater
//! that keeps its pairs instead of swapping has to measure whatever passes
//! through it, and sooner or later disturbs an authentication qubit.
//!
//! Modules, bottom up:
//!
//! - [`qsim`]: small noiseless state-vector simulator (gates, measurement,
//!   Bell pairs, teleportation, swapping).
//! - [`key`]: key material, the `R` window schedule, auth-bit pairs, capacity.
//! - [`protocol`]: initiator / responder state machines.
//! - [`adversary`]: honest and intercept-resend repeater behaviors.
//! - [`netsim`]: repeater chain, pair supply, classical channel, trial loop.
//! - [`experiments`]: Monte Carlo campaigns, analytic models, CSV/JSON/table output.

pub mod adversary;
pub mod experiments;
pub mod key;
pub mod netsim;
pub mod protocol;
pub mod qsim;

pub use adversary::{BasisPolicy, RepeaterBehavior};
pub use key::{capacity, AuthPlan, AuthState, KeyCursors, KeyMaterial, ScheduleConfig};
pub use netsim::{run_trial, Topology, TrialRecord};
pub use protocol::{SessionConfig, SessionState};
pub use qsim::{Basis, QubitRef, RngStream, Simulator};
