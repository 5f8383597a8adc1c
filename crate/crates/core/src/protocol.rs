//! Initiator (data sender, verifier) and responder (data receiver, prover)
//! state machines.
//!
//! Both machines are advanced one [`Event`] at a time and answer with a list
//! of [`Action`]s. They never move qubits between nodes themselves: an
//! [`Action::Send`] asks the surrounding network to teleport a qubit to the
//! peer, and the arrival comes back later as [`Event::QubitArrived`]. A sent
//! qubit carries no tag saying whether it is data or authentication.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::key::{AuthPlan, AuthState, KeyCursors, KeyError, KeyMaterial, ScheduleConfig};
use crate::qsim::{Amplitude, Basis, QsimError, QubitRef, RngStream, Simulator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Key(#[from] KeyError),
    #[error("{role:?} received a qubit in phase {phase:?}")]
    UnexpectedQubit { role: Role, phase: Phase },
    #[error("session is already finished ({0:?})")]
    Finished(Phase),
    #[error("channel failure: {0}")]
    Channel(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Initiator,
    Responder,
}

/// Direction of travel between the two endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "A->B")]
    AliceToBob,
    #[serde(rename = "B->A")]
    BobToAlice,
}

impl Direction {
    pub fn from_sender(role: Role) -> Self {
        match role {
            Role::Initiator => Direction::AliceToBob,
            Role::Responder => Direction::BobToAlice,
        }
    }
}

/// Anything that can move a qubit from one endpoint to the other.
pub trait QuantumChannel {
    /// Teleports `qubit` in `direction`; returns the qubit now held by the receiver.
    fn transmit(
        &mut self,
        qubit: QubitRef,
        direction: Direction,
        sim: &mut Simulator,
        rng: &mut RngStream,
    ) -> Result<QubitRef, ProtocolError>;
}

/// How data-qubit states are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayloadDistribution {
    /// Uniform over `|0>, |1>, |+>, |->`.
    #[default]
    UniformFourState,
    Fixed { state: AuthState },
    /// Uniform on the Bloch sphere.
    HaarRandom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub key: KeyMaterial,
    pub schedule: ScheduleConfig,
    pub data_qubit_target: u64,
    #[serde(default)]
    pub reverse_auth: bool,
    #[serde(default)]
    pub payload: PayloadDistribution,
}

impl SessionConfig {
    pub fn new(key: KeyMaterial, schedule: ScheduleConfig, data_qubit_target: u64) -> Result<Self, KeyError> {
        schedule.check_key(&key)?;
        Ok(Self {
            key,
            schedule,
            data_qubit_target,
            reverse_auth: false,
            payload: PayloadDistribution::default(),
        })
    }

    pub fn validate(&self) -> Result<(), KeyError> {
        self.schedule.check_key(&self.key)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminationReason {
    AuthenticationFailed,
    Transport,
    Timeout,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    ComputeR,
    DataTransfer { sent: u64, window: u64 },
    AuthPrepare,
    AuthAwait,
    AuthVerify { qubit: QubitRef },
    Terminated(TerminationReason),
    Complete,
}

impl Phase {
    pub fn is_absorbing(&self) -> bool {
        matches!(self, Phase::Terminated(_) | Phase::Complete)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuthVerdict {
    pub pass: bool,
    pub round: u64,
    pub measured_bit: u8,
    pub expected_bit: u8,
    pub basis_used: Basis,
    pub verifier: Role,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Tick,
    QubitArrived(QubitRef),
    ChannelClosed,
    Timeout,
}

/// Ground truth of a data qubit at the moment it was prepared.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PayloadTruth {
    pub amplitudes: [Amplitude; 2],
    pub label: Option<AuthState>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    /// Teleport this qubit to the peer.
    Send(QubitRef),
    /// A fresh `R` was drawn (both parties draw the same values).
    WindowDrawn { round: u64, window: u64 },
    /// Local bookkeeping for the sender; never leaves the node.
    PayloadPrepared(PayloadTruth),
    AuthPrepared { round: u64, state: AuthState },
    /// A data qubit reached the responder and is handed to the application.
    DataReceived(QubitRef),
    Verdict(AuthVerdict),
    Terminated(TerminationReason),
    Completed,
}

/// One endpoint's view of the session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionState {
    role: Role,
    phase: Phase,
    cursors: KeyCursors,
    rounds_completed: u64,
    qubits_delivered: u64,
    auth_sent: u64,
    auth_received: u64,
    plan: Option<AuthPlan>,
}

impl SessionState {
    pub fn new(role: Role) -> Self {
        Self {
            role,
            phase: Phase::ComputeR,
            cursors: KeyCursors::new(),
            rounds_completed: 0,
            qubits_delivered: 0,
            auth_sent: 0,
            auth_received: 0,
            plan: None,
        }
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn cursors(&self) -> &KeyCursors {
        &self.cursors
    }

    pub fn rounds_completed(&self) -> u64 {
        self.rounds_completed
    }

    /// Data qubits sent (initiator) or received (responder).
    pub fn qubits_delivered(&self) -> u64 {
        self.qubits_delivered
    }

    pub fn auth_sent(&self) -> u64 {
        self.auth_sent
    }

    pub fn auth_received(&self) -> u64 {
        self.auth_received
    }

    pub fn is_absorbing(&self) -> bool {
        self.phase.is_absorbing()
    }

    /// 1-based index of the round in progress.
    fn current_round(&self) -> u64 {
        self.rounds_completed + 1
    }

    /// Dispatches to [`initiator_step`] or [`responder_step`].
    pub fn step(
        &mut self,
        cfg: &SessionConfig,
        event: Event,
        sim: &mut Simulator,
        rng: &mut RngStream,
    ) -> Result<Vec<Action>, ProtocolError> {
        match self.role {
            Role::Initiator => initiator_step(self, cfg, event, sim, rng),
            Role::Responder => responder_step(self, cfg, event, sim, rng),
        }
    }

    fn terminate(&mut self, reason: TerminationReason, actions: &mut Vec<Action>) {
        self.phase = Phase::Terminated(reason);
        actions.push(Action::Terminated(reason));
    }

    /// Shared by both roles: the data target decides completion, otherwise a
    /// new window is drawn from the key.
    fn compute_r(&mut self, cfg: &SessionConfig, actions: &mut Vec<Action>) {
        if self.qubits_delivered >= cfg.data_qubit_target {
            self.phase = Phase::Complete;
            actions.push(Action::Completed);
            return;
        }
        let window = self.cursors.next_r(&cfg.key, &cfg.schedule);
        actions.push(Action::WindowDrawn {
            round: self.current_round(),
            window,
        });
        self.phase = Phase::DataTransfer { sent: 0, window };
    }

    fn window_closed(&self, cfg: &SessionConfig, sent: u64, window: u64) -> bool {
        sent >= window || self.qubits_delivered >= cfg.data_qubit_target
    }

    fn verify(
        &mut self,
        qubit: QubitRef,
        sim: &mut Simulator,
        rng: &mut RngStream,
        actions: &mut Vec<Action>,
    ) -> Result<AuthVerdict, ProtocolError> {
        let plan = self.plan.expect("plan is drawn before any auth qubit is verified");
        let verdict = measure_auth_qubit(plan, qubit, self.current_round(), self.role, sim, rng)?;
        self.auth_received += 1;
        actions.push(Action::Verdict(verdict));
        if !verdict.pass {
            // Silent: nothing is sent back over the channel.
            self.terminate(TerminationReason::AuthenticationFailed, actions);
        }
        Ok(verdict)
    }

    /// Runs the transitions that need no input from the peer, so an arrival
    /// finds the party waiting for it.
    fn settle(&mut self, cfg: &SessionConfig, actions: &mut Vec<Action>) {
        loop {
            match self.phase {
                Phase::ComputeR => self.compute_r(cfg, actions),
                Phase::DataTransfer { sent, window } if self.window_closed(cfg, sent, window) => match self.role {
                    Role::Initiator => {
                        self.plan = Some(self.cursors.next_auth_pair(&cfg.key, &cfg.schedule));
                        self.phase = Phase::AuthAwait;
                    }
                    Role::Responder => self.phase = Phase::AuthPrepare,
                },
                _ => return,
            }
        }
    }

    fn finish_round(&mut self) {
        self.rounds_completed += 1;
        self.plan = None;
        self.phase = Phase::ComputeR;
    }
}

fn closing_event(state: &mut SessionState, event: Event, actions: &mut Vec<Action>) -> bool {
    match event {
        Event::ChannelClosed => {
            state.terminate(TerminationReason::Transport, actions);
            true
        }
        Event::Timeout => {
            state.terminate(TerminationReason::Timeout, actions);
            true
        }
        _ => false,
    }
}

/// Alice: draws `R`, teleports `R` data qubits, waits for the authentication
/// qubit, verifies it, and (in reverse mode) proves herself with the same plan.
pub fn initiator_step(
    state: &mut SessionState,
    cfg: &SessionConfig,
    event: Event,
    sim: &mut Simulator,
    rng: &mut RngStream,
) -> Result<Vec<Action>, ProtocolError> {
    if state.is_absorbing() {
        return Err(ProtocolError::Finished(state.phase));
    }
    let mut actions = Vec::new();
    if closing_event(state, event, &mut actions) {
        return Ok(actions);
    }
    if let Event::QubitArrived(q) = event {
        state.settle(cfg, &mut actions);
        if state.phase != Phase::AuthAwait {
            return Err(ProtocolError::UnexpectedQubit {
                role: state.role,
                phase: state.phase,
            });
        }
        // Verified within this step; AuthVerify never outlives it.
        state.phase = Phase::AuthVerify { qubit: q };
    }

    match state.phase {
        Phase::ComputeR => state.compute_r(cfg, &mut actions),
        Phase::DataTransfer { sent, window } => {
            if !state.window_closed(cfg, sent, window) {
                let (q, truth) = payload_source(cfg.payload, sim, rng)?;
                actions.push(Action::PayloadPrepared(truth));
                actions.push(Action::Send(q));
                state.qubits_delivered += 1;
                state.phase = Phase::DataTransfer { sent: sent + 1, window };
            }
            if let Phase::DataTransfer { sent, window } = state.phase {
                if state.window_closed(cfg, sent, window) {
                    state.plan = Some(state.cursors.next_auth_pair(&cfg.key, &cfg.schedule));
                    state.phase = Phase::AuthAwait;
                }
            }
        }
        Phase::AuthAwait => {}
        Phase::AuthVerify { qubit } => {
            let verdict = state.verify(qubit, sim, rng, &mut actions)?;
            if verdict.pass {
                if cfg.reverse_auth {
                    state.phase = Phase::AuthPrepare;
                } else {
                    state.finish_round();
                }
            }
        }
        Phase::AuthPrepare => {
            let plan = state.plan.expect("reverse round reuses the forward plan");
            let q = prepare_auth_qubit(plan, sim)?;
            actions.push(Action::AuthPrepared {
                round: state.current_round(),
                state: plan.expected_state(),
            });
            actions.push(Action::Send(q));
            state.auth_sent += 1;
            state.finish_round();
        }
        Phase::Terminated(_) | Phase::Complete => unreachable!("checked above"),
    }
    Ok(actions)
}

/// Bob: counts `R` arriving data qubits, then prepares and teleports the
/// authentication qubit drawn from the next key pair.
pub fn responder_step(
    state: &mut SessionState,
    cfg: &SessionConfig,
    event: Event,
    sim: &mut Simulator,
    rng: &mut RngStream,
) -> Result<Vec<Action>, ProtocolError> {
    if state.is_absorbing() {
        return Err(ProtocolError::Finished(state.phase));
    }
    let mut actions = Vec::new();
    if closing_event(state, event, &mut actions) {
        return Ok(actions);
    }
    if let Event::QubitArrived(q) = event {
        state.settle(cfg, &mut actions);
        match state.phase {
            Phase::DataTransfer { sent, window } if !state.window_closed(cfg, sent, window) => {
                state.qubits_delivered += 1;
                state.phase = Phase::DataTransfer { sent: sent + 1, window };
                actions.push(Action::DataReceived(q));
                if state.window_closed(cfg, sent + 1, window) {
                    state.phase = Phase::AuthPrepare;
                }
            }
            Phase::AuthAwait => state.phase = Phase::AuthVerify { qubit: q },
            phase => {
                return Err(ProtocolError::UnexpectedQubit { role: state.role, phase });
            }
        }
        if !matches!(state.phase, Phase::AuthVerify { .. }) {
            return Ok(actions);
        }
    }

    match state.phase {
        Phase::ComputeR => {
            state.compute_r(cfg, &mut actions);
            if let Phase::DataTransfer { sent, window } = state.phase {
                if state.window_closed(cfg, sent, window) {
                    state.phase = Phase::AuthPrepare;
                }
            }
        }
        Phase::DataTransfer { .. } | Phase::AuthAwait => {}
        Phase::AuthPrepare => {
            let plan = state.cursors.next_auth_pair(&cfg.key, &cfg.schedule);
            state.plan = Some(plan);
            let q = prepare_auth_qubit(plan, sim)?;
            actions.push(Action::AuthPrepared {
                round: state.current_round(),
                state: plan.expected_state(),
            });
            actions.push(Action::Send(q));
            state.auth_sent += 1;
            if cfg.reverse_auth {
                state.phase = Phase::AuthAwait;
            } else {
                state.finish_round();
            }
        }
        Phase::AuthVerify { qubit } => {
            if state.verify(qubit, sim, rng, &mut actions)?.pass {
                state.finish_round();
            }
        }
        Phase::Terminated(_) | Phase::Complete => unreachable!("checked above"),
    }
    Ok(actions)
}

/// `|0>`, then X if the encoding bit is set, then H if the base bit is set.
pub fn prepare_auth_qubit(plan: AuthPlan, sim: &mut Simulator) -> Result<QubitRef, QsimError> {
    let q = sim.allocate_qubit()?;
    if plan.encoding_bit == 1 {
        sim.x(q)?;
    }
    if plan.base_bit == 1 {
        sim.h(q)?;
    }
    Ok(q)
}

/// Measures a received authentication qubit in the plan's basis and releases it.
pub fn measure_auth_qubit(
    plan: AuthPlan,
    qubit: QubitRef,
    round: u64,
    verifier: Role,
    sim: &mut Simulator,
    rng: &mut RngStream,
) -> Result<AuthVerdict, QsimError> {
    let basis = plan.basis();
    let measured_bit = sim.measure(qubit, basis, rng)?;
    sim.release(qubit)?;
    Ok(AuthVerdict {
        pass: measured_bit == plan.encoding_bit,
        round,
        measured_bit,
        expected_bit: plan.encoding_bit,
        basis_used: basis,
        verifier,
    })
}

/// One prepare / transmit / verify exchange with `prover` preparing the qubit.
pub fn authenticate_once(
    plan: AuthPlan,
    prover: Role,
    round: u64,
    channel: &mut dyn QuantumChannel,
    sim: &mut Simulator,
    rng: &mut RngStream,
) -> Result<AuthVerdict, ProtocolError> {
    let q = prepare_auth_qubit(plan, sim)?;
    let arrived = channel.transmit(q, Direction::from_sender(prover), sim, rng)?;
    let verifier = match prover {
        Role::Initiator => Role::Responder,
        Role::Responder => Role::Initiator,
    };
    Ok(measure_auth_qubit(plan, arrived, round, verifier, sim, rng)?)
}

/// The mirrored exchange: Alice proves herself to Bob with the round's plan.
pub fn reverse_authenticate(
    plan: AuthPlan,
    round: u64,
    channel: &mut dyn QuantumChannel,
    sim: &mut Simulator,
    rng: &mut RngStream,
) -> Result<AuthVerdict, ProtocolError> {
    authenticate_once(plan, Role::Initiator, round, channel, sim, rng)
}

/// Prepares one data qubit according to `dist` and reports what it holds.
pub fn payload_source(
    dist: PayloadDistribution,
    sim: &mut Simulator,
    rng: &mut RngStream,
) -> Result<(QubitRef, PayloadTruth), QsimError> {
    let (amplitudes, label) = match dist {
        PayloadDistribution::Fixed { state } => (four_state_amplitudes(state), Some(state)),
        PayloadDistribution::UniformFourState => {
            let state = match (rng.bit(), rng.bit()) {
                (0, 0) => AuthState::Zero,
                (1, 0) => AuthState::One,
                (0, _) => AuthState::Plus,
                _ => AuthState::Minus,
            };
            (four_state_amplitudes(state), Some(state))
        }
        PayloadDistribution::HaarRandom => {
            let cos_theta = 2.0 * rng.uniform() - 1.0;
            let phi = 2.0 * PI * rng.uniform();
            let half = cos_theta.clamp(-1.0, 1.0).acos() / 2.0;
            (
                [
                    Amplitude::new(half.cos(), 0.0),
                    Amplitude::from_polar(half.sin(), phi),
                ],
                None,
            )
        }
    };
    let q = sim.allocate_with(amplitudes)?;
    Ok((q, PayloadTruth { amplitudes, label }))
}

pub fn four_state_amplitudes(state: AuthState) -> [Amplitude; 2] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (a, b) = match state {
        AuthState::Zero => (1.0, 0.0),
        AuthState::One => (0.0, 1.0),
        AuthState::Plus => (h, h),
        AuthState::Minus => (h, -h),
    };
    [Amplitude::new(a, 0.0), Amplitude::new(b, 0.0)]
}

/// Endpoint-side log record; one JSON line per teleportation or verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum TraceEvent {
    Window {
        round: u64,
        r: u64,
    },
    Teleport {
        seq: u64,
        from: Role,
        to: Role,
        kind: QubitKind,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        state: Option<AuthState>,
    },
    Verdict(AuthVerdict),
    Terminated {
        role: Role,
        reason: TerminationReason,
    },
    Complete {
        role: Role,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QubitKind {
    Data,
    Auth,
}

pub fn trace_to_json_lines(trace: &[TraceEvent]) -> String {
    trace
        .iter()
        .map(|e| serde_json::to_string(e).expect("trace events serialize") + "\n")
        .collect()
}
