//! Noiseless state-vector simulation of small groups of qubits.
//!
//! Every live qubit belongs to exactly one [`StateVector`] group. Two-qubit
//! gates across groups merge them by tensor product; measurement factors the
//! measured qubit back out into a singleton group, so groups stay as small as
//! the entanglement structure allows.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Largest number of qubits a single entangled group may hold.
pub const MAX_GROUP_QUBITS: usize = 16;

/// Default number of simultaneously live qubits in one [`Simulator`].
pub const DEFAULT_REGISTRY_CAPACITY: usize = 1 << 12;

/// Tolerance for norm and state-equality checks.
pub const TOLERANCE: f64 = 1e-9;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QsimError {
    #[error("qubit registry is full ({0} live qubits)")]
    CapacityExceeded(usize),
    #[error("entangled group would hold {0} qubits (cap is {MAX_GROUP_QUBITS})")]
    GroupTooLarge(usize),
    #[error("{0} is not a live qubit")]
    DeadQubit(QubitRef),
    #[error("two-qubit gate needs distinct qubits, got {0} twice")]
    SameQubit(QubitRef),
    #[error("gate {gate:?} expects {expected} target(s), got {got}")]
    Arity {
        gate: Gate,
        expected: usize,
        got: usize,
    },
    #[error("{0} and {1} do not share an entangled group; cannot use them as a teleportation resource")]
    NotEntangled(QubitRef, QubitRef),
    #[error("{0} is still entangled with other qubits and cannot be released")]
    StillEntangled(QubitRef),
    #[error("state amplitudes are not normalizable")]
    InvalidState,
}

/// Opaque handle to a simulated qubit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QubitRef(u64);

impl QubitRef {
    pub fn id(self) -> u64 {
        self.0
    }
}

impl fmt::Display for QubitRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "q{}", self.0)
    }
}

/// Measurement / encoding basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    pub fn other(self) -> Basis {
        match self {
            Basis::Z => Basis::X,
            Basis::X => Basis::Z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    X,
    Z,
    H,
    /// Targets are `[control, target]`.
    Cnot,
}

impl Gate {
    fn arity(self) -> usize {
        match self {
            Gate::Cnot => 2,
            _ => 1,
        }
    }

    fn matrix(self) -> [[Amplitude; 2]; 2] {
        let one = Amplitude::new(1.0, 0.0);
        let zero = Amplitude::new(0.0, 0.0);
        let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
        match self {
            Gate::X => [[zero, one], [one, zero]],
            Gate::Z => [[one, zero], [zero, -one]],
            Gate::H => [[h, h], [h, -h]],
            Gate::Cnot => unreachable!("CNOT has no single-qubit matrix"),
        }
    }
}

/// The two classical bits produced by a Bell-state measurement.
///
/// `a` comes from the first (control) qubit and drives the Z correction,
/// `b` comes from the second qubit and drives the X correction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CorrectionBits {
    pub a: u8,
    pub b: u8,
}

/// Seeded, reproducible randomness for one simulation instance.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Fair coin as a bit.
    pub fn bit(&mut self) -> u8 {
        u8::from(self.inner.random::<bool>())
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Amplitudes of a group of qubits.
///
/// `qubits[0]` is the most significant bit of the amplitude index, so for two
/// qubits the order is `|00>, |01>, |10>, |11>` with the first qubit on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    qubits: Vec<QubitRef>,
    amps: Vec<Amplitude>,
}

#[derive(Serialize)]
struct StateDump {
    qubits: Vec<u64>,
    amplitudes: Vec<[f64; 2]>,
}

impl StateVector {
    fn ground(q: QubitRef) -> Self {
        Self {
            qubits: vec![q],
            amps: vec![Amplitude::new(1.0, 0.0), Amplitude::new(0.0, 0.0)],
        }
    }

    pub fn qubits(&self) -> &[QubitRef] {
        &self.qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn position(&self, q: QubitRef) -> usize {
        self.qubits
            .iter()
            .position(|&x| x == q)
            .expect("registry points at a group that holds the qubit")
    }

    fn bit_mask(&self, pos: usize) -> usize {
        1 << (self.qubits.len() - 1 - pos)
    }

    fn tensor(self, other: StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        let mut qubits = self.qubits;
        qubits.extend(other.qubits);
        StateVector { qubits, amps }
    }

    fn apply_single(&mut self, pos: usize, m: [[Amplitude; 2]; 2]) {
        let mask = self.bit_mask(pos);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | mask]);
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | mask] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_cnot(&mut self, control: usize, target: usize) {
        let (cm, tm) = (self.bit_mask(control), self.bit_mask(target));
        for i in 0..self.amps.len() {
            if i & cm != 0 && i & tm == 0 {
                self.amps.swap(i, i | tm);
            }
        }
    }

    fn probability_of_one(&self, pos: usize) -> f64 {
        let mask = self.bit_mask(pos);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Projects `pos` onto `outcome` and removes it, returning the renormalized rest.
    fn collapse(self, pos: usize, outcome: u8, probability: f64) -> StateVector {
        let mask = self.bit_mask(pos);
        let scale = 1.0 / probability.sqrt();
        let want = if outcome == 1 { mask } else { 0 };
        let amps = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, a)| a * scale)
            .collect();
        let mut qubits = self.qubits;
        qubits.remove(pos);
        StateVector { qubits, amps }
    }

    /// JSON dump: ordered qubit ids plus `[re, im]` pairs.
    pub fn to_debug_json(&self) -> String {
        let dump = StateDump {
            qubits: self.qubits.iter().map(|q| q.0).collect(),
            amplitudes: self.amps.iter().map(|a| [a.re, a.im]).collect(),
        };
        serde_json::to_string(&dump).expect("plain numbers always serialize")
    }
}

/// `true` when `a` and `b` describe the same state up to a global phase.
pub fn equal_up_to_phase(a: &[Amplitude], b: &[Amplitude], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let inner: Amplitude = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    if inner.norm() < tol {
        return a.iter().chain(b).all(|x| x.norm() < tol);
    }
    let phase = inner / inner.norm();
    a.iter().zip(b).all(|(x, y)| (x * phase - y).norm() <= tol)
}

type GroupId = u64;

/// Registry of live qubits and the entangled groups holding them.
#[derive(Debug)]
pub struct Simulator {
    groups: BTreeMap<GroupId, StateVector>,
    location: BTreeMap<QubitRef, GroupId>,
    next_qubit: u64,
    next_group: GroupId,
    capacity: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Self::new()
    }
}

impl Simulator {
    pub fn new() -> Self {
        Self::with_capacity(DEFAULT_REGISTRY_CAPACITY)
    }

    pub fn with_capacity(capacity: usize) -> Self {
        Self {
            groups: BTreeMap::new(),
            location: BTreeMap::new(),
            next_qubit: 0,
            next_group: 0,
            capacity,
        }
    }

    pub fn live_qubits(&self) -> usize {
        self.location.len()
    }

    pub fn is_live(&self, q: QubitRef) -> bool {
        self.location.contains_key(&q)
    }

    fn group_of(&self, q: QubitRef) -> Result<GroupId, QsimError> {
        self.location.get(&q).copied().ok_or(QsimError::DeadQubit(q))
    }

    fn insert_group(&mut self, state: StateVector) -> GroupId {
        let id = self.next_group;
        self.next_group += 1;
        for &q in &state.qubits {
            self.location.insert(q, id);
        }
        self.groups.insert(id, state);
        id
    }

    /// New qubit in `|0>`, alone in its own group.
    pub fn allocate_qubit(&mut self) -> Result<QubitRef, QsimError> {
        if self.location.len() >= self.capacity {
            return Err(QsimError::CapacityExceeded(self.capacity));
        }
        let q = QubitRef(self.next_qubit);
        self.next_qubit += 1;
        self.insert_group(StateVector::ground(q));
        Ok(q)
    }

    /// New qubit in `alpha|0> + beta|1>` (renormalized).
    pub fn allocate_with(&mut self, amps: [Amplitude; 2]) -> Result<QubitRef, QsimError> {
        let norm = (amps[0].norm_sqr() + amps[1].norm_sqr()).sqrt();
        if !norm.is_finite() || norm < TOLERANCE {
            return Err(QsimError::InvalidState);
        }
        let q = self.allocate_qubit()?;
        let gid = self.location[&q];
        self.groups.get_mut(&gid).expect("fresh group").amps = amps.iter().map(|a| a / norm).collect();
        Ok(q)
    }

    /// The group currently holding `q`.
    pub fn state(&self, q: QubitRef) -> Result<&StateVector, QsimError> {
        let gid = self.group_of(q)?;
        Ok(&self.groups[&gid])
    }

    /// Amplitudes of `q` when it is not entangled with anything else.
    pub fn single_qubit_amplitudes(&self, q: QubitRef) -> Result<Option<[Amplitude; 2]>, QsimError> {
        let state = self.state(q)?;
        Ok((state.len() == 1).then(|| [state.amps[0], state.amps[1]]))
    }

    pub fn same_group(&self, a: QubitRef, b: QubitRef) -> Result<bool, QsimError> {
        Ok(self.group_of(a)? == self.group_of(b)?)
    }

    /// Merges the groups of `a` and `b` if they differ; returns the shared group id.
    fn merge(&mut self, a: QubitRef, b: QubitRef) -> Result<GroupId, QsimError> {
        let (ga, gb) = (self.group_of(a)?, self.group_of(b)?);
        if ga == gb {
            return Ok(ga);
        }
        let size = self.groups[&ga].len() + self.groups[&gb].len();
        if size > MAX_GROUP_QUBITS {
            return Err(QsimError::GroupTooLarge(size));
        }
        let left = self.groups.remove(&ga).expect("live group");
        let right = self.groups.remove(&gb).expect("live group");
        Ok(self.insert_group(left.tensor(right)))
    }

    pub fn apply_gate(&mut self, gate: Gate, targets: &[QubitRef]) -> Result<(), QsimError> {
        if targets.len() != gate.arity() {
            return Err(QsimError::Arity {
                gate,
                expected: gate.arity(),
                got: targets.len(),
            });
        }
        match gate {
            Gate::Cnot => {
                let (c, t) = (targets[0], targets[1]);
                if c == t {
                    return Err(QsimError::SameQubit(c));
                }
                let gid = self.merge(c, t)?;
                let state = self.groups.get_mut(&gid).expect("merged group");
                let (pc, pt) = (state.position(c), state.position(t));
                state.apply_cnot(pc, pt);
            }
            _ => {
                let q = targets[0];
                let gid = self.group_of(q)?;
                let state = self.groups.get_mut(&gid).expect("live group");
                let pos = state.position(q);
                state.apply_single(pos, gate.matrix());
            }
        }
        Ok(())
    }

    pub fn x(&mut self, q: QubitRef) -> Result<(), QsimError> {
        self.apply_gate(Gate::X, &[q])
    }

    pub fn z(&mut self, q: QubitRef) -> Result<(), QsimError> {
        self.apply_gate(Gate::Z, &[q])
    }

    pub fn h(&mut self, q: QubitRef) -> Result<(), QsimError> {
        self.apply_gate(Gate::H, &[q])
    }

    pub fn cnot(&mut self, control: QubitRef, target: QubitRef) -> Result<(), QsimError> {
        self.apply_gate(Gate::Cnot, &[control, target])
    }

    /// Born-rule measurement. The qubit stays live, alone in its own group, in
    /// the eigenstate matching the outcome (`0 -> |0>/|+>`, `1 -> |1>/|->`).
    pub fn measure(&mut self, q: QubitRef, basis: Basis, rng: &mut RngStream) -> Result<u8, QsimError> {
        if basis == Basis::X {
            self.h(q)?;
        }
        let gid = self.group_of(q)?;
        let state = self.groups.remove(&gid).expect("live group");
        let pos = state.position(q);
        let p1 = state.probability_of_one(pos).clamp(0.0, 1.0);
        let outcome = u8::from(rng.uniform() < p1);
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };

        for &other in &state.qubits {
            self.location.remove(&other);
        }
        let rest = state.collapse(pos, outcome, p);
        if !rest.is_empty() {
            self.insert_group(rest);
        }
        let mut measured = StateVector::ground(q);
        if outcome == 1 {
            measured.amps.swap(0, 1);
        }
        self.insert_group(measured);
        if basis == Basis::X {
            self.h(q)?;
        }
        Ok(outcome)
    }

    /// Drops an unentangled qubit from the registry.
    pub fn release(&mut self, q: QubitRef) -> Result<(), QsimError> {
        let gid = self.group_of(q)?;
        if self.groups[&gid].len() != 1 {
            return Err(QsimError::StillEntangled(q));
        }
        self.groups.remove(&gid);
        self.location.remove(&q);
        Ok(())
    }

    /// Measures `q` in Z and releases it, whatever its entanglement.
    pub fn discard(&mut self, q: QubitRef, rng: &mut RngStream) -> Result<(), QsimError> {
        self.measure(q, Basis::Z, rng)?;
        self.release(q)
    }

    /// Two fresh qubits in `(|00> + |11>)/sqrt(2)`.
    pub fn make_bell_pair(&mut self) -> Result<(QubitRef, QubitRef), QsimError> {
        let a = self.allocate_qubit()?;
        let b = match self.allocate_qubit() {
            Ok(b) => b,
            Err(e) => {
                self.release(a)?;
                return Err(e);
            }
        };
        self.h(a)?;
        self.cnot(a, b)?;
        Ok((a, b))
    }

    /// CNOT(a -> b), H(a), then Z-measure both; both qubits are consumed.
    pub fn bell_measure(&mut self, a: QubitRef, b: QubitRef, rng: &mut RngStream) -> Result<CorrectionBits, QsimError> {
        self.cnot(a, b)?;
        self.h(a)?;
        let ma = self.measure(a, Basis::Z, rng)?;
        let mb = self.measure(b, Basis::Z, rng)?;
        self.release(a)?;
        self.release(b)?;
        Ok(CorrectionBits { a: ma, b: mb })
    }

    /// Applies `X^b` then `Z^a` to `q`.
    pub fn apply_correction(&mut self, q: QubitRef, bits: CorrectionBits) -> Result<(), QsimError> {
        if bits.b == 1 {
            self.x(q)?;
        }
        if bits.a == 1 {
            self.z(q)?;
        }
        Ok(())
    }

    /// Moves the state of `payload` onto `epr_remote` using the pair
    /// `(epr_local, epr_remote)`. Returns the receiving qubit and the two
    /// classical bits that travelled to the receiver.
    pub fn teleport(
        &mut self,
        payload: QubitRef,
        epr_local: QubitRef,
        epr_remote: QubitRef,
        rng: &mut RngStream,
    ) -> Result<(QubitRef, CorrectionBits), QsimError> {
        if epr_local == epr_remote || !self.same_group(epr_local, epr_remote)? {
            return Err(QsimError::NotEntangled(epr_local, epr_remote));
        }
        self.group_of(payload)?;
        let bits = self.bell_measure(payload, epr_local, rng)?;
        self.apply_correction(epr_remote, bits)?;
        Ok((epr_remote, bits))
    }

    /// Bell-measures the two inner halves of adjacent pairs. The caller
    /// applies the returned correction at the far end of the right-hand pair.
    pub fn entanglement_swap(&mut self, left: QubitRef, right: QubitRef, rng: &mut RngStream) -> Result<CorrectionBits, QsimError> {
        self.bell_measure(left, right, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Amplitude {
        Amplitude::new(re, im)
    }

    #[test]
    fn fresh_qubit_measures_zero() {
        let mut sim = Simulator::new();
        let mut rng = RngStream::new(1);
        for _ in 0..100 {
            let q = sim.allocate_qubit().unwrap();
            assert_eq!(sim.measure(q, Basis::Z, &mut rng).unwrap(), 0);
            sim.release(q).unwrap();
        }
    }

    #[test]
    fn hadamard_on_zero_is_plus() {
        let mut sim = Simulator::new();
        let mut rng = RngStream::new(2);
        for _ in 0..100 {
            let q = sim.allocate_qubit().unwrap();
            sim.h(q).unwrap();
            assert_eq!(sim.measure(q, Basis::X, &mut rng).unwrap(), 0);
            sim.release(q).unwrap();
        }
    }

    #[test]
    fn two_allocations_stay_separate() {
        let mut sim = Simulator::new();
        let a = sim.allocate_qubit().unwrap();
        let b = sim.allocate_qubit().unwrap();
        assert!(!sim.same_group(a, b).unwrap());
        assert_eq!(sim.state(a).unwrap().len(), 1);
    }

    #[test]
    fn x_then_h_gives_minus() {
        let mut sim = Simulator::new();
        let q = sim.allocate_qubit().unwrap();
        sim.x(q).unwrap();
        sim.h(q).unwrap();
        let amps = sim.single_qubit_amplitudes(q).unwrap().unwrap();
        assert!((amps[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < TOLERANCE);
        assert!((amps[1] - c(-FRAC_1_SQRT_2, 0.0)).norm() < TOLERANCE);
    }

    #[test]
    fn bell_circuit_amplitudes() {
        let mut sim = Simulator::new();
        let (a, b) = sim.make_bell_pair().unwrap();
        let st = sim.state(a).unwrap();
        assert_eq!(st.qubits(), &[a, b]);
        let expected = [c(FRAC_1_SQRT_2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(FRAC_1_SQRT_2, 0.0)];
        assert!(equal_up_to_phase(st.amplitudes(), &expected, TOLERANCE));
    }

    #[test]
    fn measurement_factors_out_and_renormalizes() {
        let mut sim = Simulator::new();
        let mut rng = RngStream::new(3);
        let (a, b) = sim.make_bell_pair().unwrap();
        let third = sim.allocate_qubit().unwrap();
        sim.cnot(b, third).unwrap();
        assert_eq!(sim.state(a).unwrap().len(), 3);
        let m = sim.measure(a, Basis::Z, &mut rng).unwrap();
        assert_eq!(sim.state(a).unwrap().len(), 1);
        let rest = sim.state(b).unwrap();
        assert_eq!(rest.len(), 2);
        assert!((rest.norm_sqr() - 1.0).abs() < TOLERANCE);
        assert_eq!(sim.measure(b, Basis::Z, &mut rng).unwrap(), m);
        assert_eq!(sim.measure(third, Basis::Z, &mut rng).unwrap(), m);
    }

    #[test]
    fn dead_and_misused_refs_error() {
        let mut sim = Simulator::new();
        let mut rng = RngStream::new(4);
        let q = sim.allocate_qubit().unwrap();
        sim.release(q).unwrap();
        assert_eq!(sim.h(q), Err(QsimError::DeadQubit(q)));
        assert_eq!(sim.measure(q, Basis::Z, &mut rng), Err(QsimError::DeadQubit(q)));
        let p = sim.allocate_qubit().unwrap();
        assert_eq!(sim.cnot(p, p), Err(QsimError::SameQubit(p)));
        assert!(matches!(sim.apply_gate(Gate::H, &[]), Err(QsimError::Arity { .. })));
        let (a, _b) = sim.make_bell_pair().unwrap();
        assert_eq!(sim.release(a), Err(QsimError::StillEntangled(a)));
    }

    #[test]
    fn registry_capacity_is_enforced() {
        let mut sim = Simulator::with_capacity(2);
        sim.allocate_qubit().unwrap();
        sim.allocate_qubit().unwrap();
        assert_eq!(sim.allocate_qubit(), Err(QsimError::CapacityExceeded(2)));
        let mut sim = Simulator::with_capacity(3);
        sim.allocate_qubit().unwrap();
        sim.allocate_qubit().unwrap();
        assert!(sim.make_bell_pair().is_err());
        assert_eq!(sim.live_qubits(), 2);
    }

    #[test]
    fn group_cap_rejects_seventeen_qubits() {
        let mut sim = Simulator::new();
        let qs: Vec<_> = (0..17).map(|_| sim.allocate_qubit().unwrap()).collect();
        for w in qs[..16].windows(2) {
            sim.cnot(w[0], w[1]).unwrap();
        }
        assert_eq!(sim.cnot(qs[15], qs[16]), Err(QsimError::GroupTooLarge(17)));
    }

    #[test]
    fn teleport_rejects_unrelated_resource() {
        let mut sim = Simulator::new();
        let mut rng = RngStream::new(5);
        let payload = sim.allocate_qubit().unwrap();
        let (a, _) = sim.make_bell_pair().unwrap();
        let (_, d) = sim.make_bell_pair().unwrap();
        assert_eq!(sim.teleport(payload, a, d, &mut rng), Err(QsimError::NotEntangled(a, d)));
    }

    #[test]
    fn debug_dump_lists_ids_and_pairs() {
        let mut sim = Simulator::new();
        let q = sim.allocate_qubit().unwrap();
        sim.x(q).unwrap();
        let json: serde_json::Value = serde_json::from_str(&sim.state(q).unwrap().to_debug_json()).unwrap();
        assert_eq!(json["qubits"], serde_json::json!([q.id()]));
        assert_eq!(json["amplitudes"], serde_json::json!([[0.0, 0.0], [1.0, 0.0]]));
    }

    #[test]
    fn global_phase_is_ignored() {
        let a = [c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)];
        let b: Vec<_> = a.iter().map(|x| x * c(0.0, 1.0)).collect();
        assert!(equal_up_to_phase(&a, &b, TOLERANCE));
        let flipped = [a[0], -a[1]];
        assert!(!equal_up_to_phase(&a, &flipped, TOLERANCE));
    }
}
