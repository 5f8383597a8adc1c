//! Repeater behaviors: the honest swapper and the intercept-resend
//! man-in-the-middle that keeps both pair halves instead of swapping.
//!
//! The malicious repeater only ever sees a qubit and the direction it is
//! travelling. It receives no key material and no data/auth label.

use serde::{Deserialize, Serialize};

use crate::protocol::Direction;
use crate::qsim::{Basis, CorrectionBits, QsimError, QubitRef, RngStream, Simulator};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisPolicy {
    #[default]
    RandomZx,
    AlwaysZ,
    AlwaysX,
}

impl BasisPolicy {
    pub fn choose(self, rng: &mut RngStream) -> Basis {
        match self {
            BasisPolicy::AlwaysZ => Basis::Z,
            BasisPolicy::AlwaysX => Basis::X,
            BasisPolicy::RandomZx => {
                if rng.bit() == 0 {
                    Basis::Z
                } else {
                    Basis::X
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepeaterBehavior {
    #[default]
    Honest,
    InterceptResend {
        #[serde(default)]
        policy: BasisPolicy,
    },
}

impl RepeaterBehavior {
    pub fn is_malicious(&self) -> bool {
        matches!(self, RepeaterBehavior::InterceptResend { .. })
    }

    pub fn label(&self) -> &'static str {
        match self {
            RepeaterBehavior::Honest => "honest",
            RepeaterBehavior::InterceptResend { policy: BasisPolicy::RandomZx } => "intercept-random-zx",
            RepeaterBehavior::InterceptResend { policy: BasisPolicy::AlwaysZ } => "intercept-always-z",
            RepeaterBehavior::InterceptResend { policy: BasisPolicy::AlwaysX } => "intercept-always-x",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterceptRecord {
    pub seq: u64,
    pub direction: Direction,
    pub basis: Basis,
    pub outcome: u8,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InterceptLog {
    records: Vec<InterceptRecord>,
}

impl InterceptLog {
    pub fn records(&self) -> &[InterceptRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn to_json_lines(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }
}

/// State of the malicious node for one session.
#[derive(Debug)]
pub struct Interceptor {
    policy: BasisPolicy,
    rng: RngStream,
    log: InterceptLog,
}

impl Interceptor {
    pub fn new(policy: BasisPolicy, rng: RngStream) -> Self {
        Self {
            policy,
            rng,
            log: InterceptLog::default(),
        }
    }

    pub fn log(&self) -> &InterceptLog {
        &self.log
    }

    pub fn into_log(self) -> InterceptLog {
        self.log
    }

    /// Measures the qubit that was just teleported onto the interceptor's
    /// half, re-prepares the collapsed eigenstate on a fresh qubit, and
    /// teleports that onward over `onward = (local half, far half)`.
    ///
    /// Returns the qubit now held at the destination and the correction bits
    /// that travelled with it.
    pub fn handle_arrival(
        &mut self,
        arrived: QubitRef,
        direction: Direction,
        onward: Option<(QubitRef, QubitRef)>,
        sim: &mut Simulator,
        world_rng: &mut RngStream,
    ) -> Result<(QubitRef, CorrectionBits), AdversaryError> {
        let (local, remote) = onward.ok_or(AdversaryError::NoOnwardPair)?;
        let basis = self.policy.choose(&mut self.rng);
        let outcome = sim.measure(arrived, basis, world_rng)?;
        sim.release(arrived)?;
        self.log.records.push(InterceptRecord {
            seq: self.log.records.len() as u64,
            direction,
            basis,
            outcome,
        });

        let fresh = sim.allocate_qubit()?;
        if outcome == 1 {
            sim.x(fresh)?;
        }
        if basis == Basis::X {
            sim.h(fresh)?;
        }
        Ok(sim.teleport(fresh, local, remote, world_rng)?)
    }
}

/// Per-session repeater state along the path.
#[derive(Debug)]
pub struct RepeaterState {
    behavior: RepeaterBehavior,
    /// Index into the path of the node that does not swap.
    malicious_node: Option<usize>,
    interceptor: Option<Interceptor>,
}

impl RepeaterState {
    pub fn behavior(&self) -> RepeaterBehavior {
        self.behavior
    }

    pub fn malicious_node(&self) -> Option<usize> {
        self.malicious_node
    }

    pub fn interceptor_mut(&mut self) -> Option<&mut Interceptor> {
        self.interceptor.as_mut()
    }

    pub fn intercept_log(&self) -> Option<&InterceptLog> {
        self.interceptor.as_ref().map(Interceptor::log)
    }

    pub fn into_intercept_log(self) -> Option<InterceptLog> {
        self.interceptor.map(Interceptor::into_log)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum AdversaryError {
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error("no onward entangled pair available to forward the intercepted qubit")]
    NoOnwardPair,
    #[error("a malicious repeater needs an intermediate node; the path has none")]
    NoIntermediateNode,
    #[error("node index {index} is not an intermediate node of a {len}-node path")]
    NotIntermediate { index: usize, len: usize },
}

/// Decides which intermediate node (if any) keeps its pairs.
///
/// `path_len` counts both endpoints. `position` picks the malicious node by
/// path index; by default it is the middle intermediate node.
pub fn setup_session(
    behavior: RepeaterBehavior,
    path_len: usize,
    position: Option<usize>,
    rng: RngStream,
) -> Result<RepeaterState, AdversaryError> {
    let (malicious_node, interceptor) = match behavior {
        RepeaterBehavior::Honest => (None, None),
        RepeaterBehavior::InterceptResend { policy } => {
            if path_len < 3 {
                return Err(AdversaryError::NoIntermediateNode);
            }
            let index = position.unwrap_or(path_len / 2);
            if index == 0 || index >= path_len - 1 {
                return Err(AdversaryError::NotIntermediate { index, len: path_len });
            }
            (Some(index), Some(Interceptor::new(policy, rng)))
        }
    };
    Ok(RepeaterState {
        behavior,
        malicious_node,
        interceptor,
    })
}
