//! Repeater-chain network, entanglement supply, classical correction channel,
//! and the event loop that runs one authentication session end to end.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversary::{setup_session, AdversaryError, InterceptLog, RepeaterBehavior, RepeaterState};
use crate::key::{KeyError, KeyMaterial, ScheduleConfig};
use crate::protocol::{
    Action, Direction, Event, PayloadDistribution, PayloadTruth, ProtocolError, QuantumChannel, QubitKind, Role,
    SessionConfig, SessionState, TraceEvent,
};
use crate::qsim::{equal_up_to_phase, CorrectionBits, QsimError, QubitRef, RngStream, Simulator, TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetsimError {
    #[error("invalid topology: {0}")]
    Topology(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Adversary(#[from] AdversaryError),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error("trial exceeded {0} scheduler steps")]
    StepLimit(u64),
}

/// Graph plus the endpoint-to-endpoint path used by the session.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub nodes: Vec<String>,
    pub edges: Vec<(String, String)>,
    /// `alice, r1, ..., rm, bob`.
    pub path: Vec<String>,
}

impl Topology {
    /// A straight chain `alice - r1 - ... - rm - bob`.
    pub fn chain(intermediate: usize) -> Self {
        let mut path = vec!["alice".to_string()];
        path.extend((1..=intermediate).map(|i| format!("r{i}")));
        path.push("bob".to_string());
        let edges = path.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
        Self {
            nodes: path.clone(),
            edges,
            path,
        }
    }

    pub fn validate(&self) -> Result<(), NetsimError> {
        if self.path.len() < 2 {
            return Err(NetsimError::Topology("path needs at least the two endpoints".into()));
        }
        for node in &self.path {
            if !self.nodes.contains(node) {
                return Err(NetsimError::Topology(format!("path node {node:?} is not in the node list")));
            }
        }
        for (i, node) in self.path.iter().enumerate() {
            if self.path[..i].contains(node) {
                return Err(NetsimError::Topology(format!("path visits {node:?} twice")));
            }
        }
        for w in self.path.windows(2) {
            let linked = self
                .edges
                .iter()
                .any(|(a, b)| (a == &w[0] && b == &w[1]) || (a == &w[1] && b == &w[0]));
            if !linked {
                return Err(NetsimError::Topology(format!("no edge between {:?} and {:?}", w[0], w[1])));
            }
        }
        Ok(())
    }

    pub fn intermediate_count(&self) -> usize {
        self.path.len().saturating_sub(2)
    }

    pub fn position(&self, node: &str) -> Option<usize> {
        self.path.iter().position(|n| n == node)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MessageKind {
    TeleportCorrection { a: u8, b: u8 },
    SwapCorrection { a: u8, b: u8 },
    SessionControl,
}

/// What an observer of the classical channel sees. Nothing here says
/// whether a teleported qubit was data or authentication.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalMessage {
    pub seq: u64,
    pub from: String,
    pub to: String,
    pub kind: MessageKind,
}

/// On-demand Bell-pair supply, one stock per path edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairInventory {
    edges: Vec<(String, String)>,
    drawn: Vec<u64>,
}

impl PairInventory {
    pub fn edges(&self) -> &[(String, String)] {
        &self.edges
    }

    pub fn pairs_drawn(&self, edge: usize) -> u64 {
        self.drawn[edge]
    }

    pub fn total_drawn(&self) -> u64 {
        self.drawn.iter().sum()
    }

    /// Fresh pair on path edge `edge`: (left node's half, right node's half).
    pub fn draw(&mut self, edge: usize, sim: &mut Simulator) -> Result<(QubitRef, QubitRef), QsimError> {
        let pair = sim.make_bell_pair()?;
        self.drawn[edge] += 1;
        Ok(pair)
    }
}

/// One stock per consecutive pair of path nodes.
pub fn distribute_entanglement(topology: &Topology) -> PairInventory {
    let edges: Vec<_> = topology.path.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    PairInventory {
        drawn: vec![0; edges.len()],
        edges,
    }
}

/// The live network for one trial: pair supply, repeaters, and the wire log.
#[derive(Debug)]
pub struct Network {
    topology: Topology,
    inventory: PairInventory,
    repeaters: RepeaterState,
    wire: Vec<ClassicalMessage>,
    teleports: u64,
}

impl Network {
    pub fn new(topology: Topology, behavior: RepeaterBehavior, malicious_node: Option<usize>, eve_rng: RngStream) -> Result<Self, NetsimError> {
        topology.validate()?;
        let repeaters = setup_session(behavior, topology.path.len(), malicious_node, eve_rng)?;
        Ok(Self {
            inventory: distribute_entanglement(&topology),
            topology,
            repeaters,
            wire: Vec::new(),
            teleports: 0,
        })
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn inventory(&self) -> &PairInventory {
        &self.inventory
    }

    pub fn wire(&self) -> &[ClassicalMessage] {
        &self.wire
    }

    pub fn teleports(&self) -> u64 {
        self.teleports
    }

    pub fn intercept_log(&self) -> Option<&InterceptLog> {
        self.repeaters.intercept_log()
    }

    fn send(&mut self, from: usize, to: usize, kind: MessageKind) {
        self.wire.push(ClassicalMessage {
            seq: self.wire.len() as u64,
            from: self.topology.path[from].clone(),
            to: self.topology.path[to].clone(),
            kind,
        });
    }

    /// Builds one Bell pair between path nodes `from < to` by swapping at
    /// every node in between, left to right. Corrections land on the
    /// right-hand qubit, i.e. at the node farther from the initiator.
    pub fn provision(&mut self, from: usize, to: usize, sim: &mut Simulator, rng: &mut RngStream) -> Result<(QubitRef, QubitRef), QsimError> {
        debug_assert!(from < to);
        let (left, mut carry) = self.inventory.draw(from, sim)?;
        for node in from + 1..to {
            let (near, far) = self.inventory.draw(node, sim)?;
            let bits = sim.entanglement_swap(carry, near, rng)?;
            sim.apply_correction(far, bits)?;
            self.send(node, node + 1, MessageKind::SwapCorrection { a: bits.a, b: bits.b });
            carry = far;
        }
        Ok((left, carry))
    }

    fn teleport_hop(
        &mut self,
        payload: QubitRef,
        pair: (QubitRef, QubitRef),
        from: usize,
        to: usize,
        sim: &mut Simulator,
        rng: &mut RngStream,
    ) -> Result<QubitRef, QsimError> {
        let (sender_half, receiver_half) = if from < to { pair } else { (pair.1, pair.0) };
        let (arrived, bits) = sim.teleport(payload, sender_half, receiver_half, rng)?;
        self.record_teleport(from, to, bits);
        Ok(arrived)
    }

    fn record_teleport(&mut self, from: usize, to: usize, bits: CorrectionBits) {
        self.teleports += 1;
        self.send(from, to, MessageKind::TeleportCorrection { a: bits.a, b: bits.b });
    }

    fn transmit_inner(
        &mut self,
        qubit: QubitRef,
        direction: Direction,
        sim: &mut Simulator,
        rng: &mut RngStream,
    ) -> Result<QubitRef, NetsimError> {
        let last = self.topology.path.len() - 1;
        let (src, dst) = match direction {
            Direction::AliceToBob => (0, last),
            Direction::BobToAlice => (last, 0),
        };
        let Some(eve) = self.repeaters.malicious_node() else {
            let pair = self.provision(0, last, sim, rng)?;
            return Ok(self.teleport_hop(qubit, pair, src, dst, sim, rng)?);
        };

        let alice_side = self.provision(0, eve, sim, rng)?;
        let bob_side = self.provision(eve, last, sim, rng)?;
        let (inbound, outbound) = match direction {
            Direction::AliceToBob => (alice_side, (bob_side.0, bob_side.1)),
            Direction::BobToAlice => (bob_side, (alice_side.1, alice_side.0)),
        };
        let at_eve = self.teleport_hop(qubit, inbound, src, eve, sim, rng)?;
        let interceptor = self.repeaters.interceptor_mut().expect("malicious node has an interceptor");
        let (arrived, bits) = interceptor.handle_arrival(at_eve, direction, Some(outbound), sim, rng)?;
        self.record_teleport(eve, dst, bits);
        Ok(arrived)
    }
}

impl QuantumChannel for Network {
    fn transmit(
        &mut self,
        qubit: QubitRef,
        direction: Direction,
        sim: &mut Simulator,
        rng: &mut RngStream,
    ) -> Result<QubitRef, ProtocolError> {
        self.transmit_inner(qubit, direction, sim, rng).map_err(|e| match e {
            NetsimError::Protocol(p) => p,
            NetsimError::Qsim(q) => ProtocolError::Qsim(q),
            other => ProtocolError::Channel(other.to_string()),
        })
    }
}

/// Outcome of one session, the unit every experiment aggregates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub seed: u64,
    pub transfer_length: u32,
    pub behavior: RepeaterBehavior,
    pub detected: bool,
    pub rounds_to_detect: Option<u64>,
    /// Data qubits that reached the responder; at detection this is the leakage.
    pub data_qubits_delivered: u64,
    pub auth_qubits_sent: u64,
    pub data_qubit_target: u64,
    pub rounds_completed: u64,
    /// Both endpoints finished normally.
    pub completed: bool,
}

impl TrialRecord {
    /// Authentication qubits per delivered data qubit, for completed sessions.
    pub fn overhead(&self) -> Option<f64> {
        (self.completed && self.data_qubits_delivered > 0).then(|| self.auth_qubits_sent as f64 / self.data_qubits_delivered as f64)
    }
}

/// Where each trial's key comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KeySource {
    Fixed(KeyMaterial),
    /// Fresh uniform bits per trial, derived from the trial seed.
    Random { length: usize },
}

impl Default for KeySource {
    fn default() -> Self {
        KeySource::Random { length: 1024 }
    }
}

/// Everything about a session except the key bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionTemplate {
    pub key: KeySource,
    pub schedule: ScheduleConfig,
    pub data_qubit_target: u64,
    pub reverse_auth: bool,
    pub payload: PayloadDistribution,
}

impl SessionTemplate {
    pub fn session_for(&self, seed: u64) -> Result<SessionConfig, KeyError> {
        let key = match &self.key {
            KeySource::Fixed(k) => k.clone(),
            KeySource::Random { length } => {
                let mut rng = RngStream::new(derive_seed(seed, KEY_STREAM));
                KeyMaterial::random(*length, &mut rng)?
            }
        };
        let mut cfg = SessionConfig::new(key, self.schedule, self.data_qubit_target)?;
        cfg.reverse_auth = self.reverse_auth;
        cfg.payload = self.payload;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOptions {
    /// Path index of the malicious node; `None` picks the middle one.
    pub malicious_node: Option<usize>,
    /// Scheduler passes with no progress before waiting parties time out.
    pub idle_timeout: u32,
    pub max_steps: u64,
}

impl Default for TrialOptions {
    fn default() -> Self {
        Self {
            malicious_node: None,
            idle_timeout: 4,
            max_steps: 1_000_000,
        }
    }
}

/// Counts of data qubits whose received state differs from what was sent.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegrityStats {
    pub compared: u64,
    pub altered: u64,
}

/// A trial with everything the observer saw along the way.
#[derive(Debug)]
pub struct TrialOutcome {
    pub record: TrialRecord,
    pub trace: Vec<TraceEvent>,
    pub wire: Vec<ClassicalMessage>,
    pub intercepts: InterceptLog,
    pub integrity: IntegrityStats,
    pub initiator: SessionState,
    pub responder: SessionState,
    pub pairs_drawn: u64,
    pub teleports: u64,
}

const KEY_STREAM: u64 = 1;
const EVE_STREAM: u64 = 2;

/// splitmix64-style derivation of a child seed from `(parent, index)`.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    let mut z = parent ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one session and returns its record. Pure in its arguments.
pub fn run_trial(topology: &Topology, behavior: RepeaterBehavior, session: &SessionConfig, seed: u64) -> Result<TrialRecord, NetsimError> {
    Ok(run_trial_detailed(topology, behavior, session, seed, TrialOptions::default())?.record)
}

pub fn run_trial_detailed(
    topology: &Topology,
    behavior: RepeaterBehavior,
    session: &SessionConfig,
    seed: u64,
    options: TrialOptions,
) -> Result<TrialOutcome, NetsimError> {
    session.validate()?;
    let mut rng = RngStream::new(seed);
    let mut sim = Simulator::new();
    let mut net = Network::new(
        topology.clone(),
        behavior,
        options.malicious_node,
        RngStream::new(derive_seed(seed, EVE_STREAM)),
    )?;

    let mut alice = SessionState::new(Role::Initiator);
    let mut bob = SessionState::new(Role::Responder);
    let mut to_alice: VecDeque<QubitRef> = VecDeque::new();
    let mut to_bob: VecDeque<QubitRef> = VecDeque::new();
    let mut truths: VecDeque<PayloadTruth> = VecDeque::new();
    let mut trace = Vec::new();
    let mut integrity = IntegrityStats::default();
    let mut detection: Option<(u64, u64)> = None;
    let mut teleport_seq = 0u64;
    let mut idle = 0u32;
    let mut steps = 0u64;

    while !(alice.is_absorbing() && bob.is_absorbing()) {
        let mut progressed = false;
        for role in [Role::Initiator, Role::Responder] {
            let (state, inbox, outbox) = match role {
                Role::Initiator => (&mut alice, &mut to_alice, &mut to_bob),
                Role::Responder => (&mut bob, &mut to_bob, &mut to_alice),
            };
            if state.is_absorbing() {
                while let Some(q) = inbox.pop_front() {
                    sim.discard(q, &mut rng)?;
                }
                continue;
            }
            steps += 1;
            if steps > options.max_steps {
                return Err(NetsimError::StepLimit(options.max_steps));
            }
            let event = match inbox.pop_front() {
                Some(q) => {
                    progressed = true;
                    Event::QubitArrived(q)
                }
                None if idle >= options.idle_timeout => Event::Timeout,
                None => Event::Tick,
            };
            let before = state.phase();
            let actions = state.step(session, event, &mut sim, &mut rng)?;
            progressed |= !actions.is_empty() || state.phase() != before;

            let mut pending = None;
            for action in actions {
                match action {
                    Action::Send(q) => {
                        let direction = Direction::from_sender(role);
                        let arrived = net.transmit(q, direction, &mut sim, &mut rng)?;
                        outbox.push_back(arrived);
                        let (kind, auth_state) = pending.take().unwrap_or((QubitKind::Data, None));
                        trace.push(TraceEvent::Teleport {
                            seq: teleport_seq,
                            from: role,
                            to: other(role),
                            kind,
                            state: auth_state,
                        });
                        teleport_seq += 1;
                    }
                    Action::PayloadPrepared(truth) => {
                        truths.push_back(truth);
                        pending = Some((QubitKind::Data, None));
                    }
                    Action::AuthPrepared { state: s, .. } => pending = Some((QubitKind::Auth, Some(s))),
                    Action::WindowDrawn { round, window } => {
                        if role == Role::Initiator {
                            trace.push(TraceEvent::Window { round, r: window });
                        }
                    }
                    Action::DataReceived(q) => {
                        if let Some(truth) = truths.pop_front() {
                            let got = sim.single_qubit_amplitudes(q)?;
                            integrity.compared += 1;
                            if !got.is_some_and(|amps| equal_up_to_phase(&amps, &truth.amplitudes, TOLERANCE)) {
                                integrity.altered += 1;
                            }
                        }
                        sim.discard(q, &mut rng)?;
                    }
                    Action::Verdict(v) => {
                        if !v.pass && detection.is_none() {
                            // Both sides agree on the data count here: the responder only
                            // sends its auth qubit after the whole window arrived.
                            detection = Some((v.round, state.qubits_delivered()));
                        }
                        trace.push(TraceEvent::Verdict(v));
                    }
                    Action::Terminated(reason) => trace.push(TraceEvent::Terminated { role, reason }),
                    Action::Completed => trace.push(TraceEvent::Complete { role }),
                }
            }
        }
        idle = if progressed { 0 } else { idle + 1 };
    }
    for q in to_alice.into_iter().chain(to_bob) {
        sim.discard(q, &mut rng)?;
    }

    let completed = alice.phase() == crate::protocol::Phase::Complete && bob.phase() == crate::protocol::Phase::Complete;
    let record = TrialRecord {
        seed,
        transfer_length: session.schedule.transfer_length(),
        behavior,
        detected: detection.is_some(),
        rounds_to_detect: detection.map(|(r, _)| r),
        data_qubits_delivered: detection.map_or(bob.qubits_delivered(), |(_, d)| d),
        auth_qubits_sent: alice.auth_sent() + bob.auth_sent(),
        data_qubit_target: session.data_qubit_target,
        rounds_completed: alice.rounds_completed(),
        completed,
    };
    Ok(TrialOutcome {
        record,
        trace,
        wire: net.wire.clone(),
        intercepts: net.repeaters.intercept_log().cloned().unwrap_or_default(),
        integrity,
        pairs_drawn: net.inventory.total_drawn(),
        teleports: net.teleports,
        initiator: alice,
        responder: bob,
    })
}

fn other(role: Role) -> Role {
    match role {
        Role::Initiator => Role::Responder,
        Role::Responder => Role::Initiator,
    }
}
