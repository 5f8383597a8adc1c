//! Shared secret key and everything derived from it: the per-round data
//! window `R`, the per-round authentication plan, and key capacity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qsim::Basis;

/// Largest supported transfer length.
pub const MAX_TRANSFER_LENGTH: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KeyError {
    #[error("key is empty")]
    Empty,
    #[error("invalid key character {0:?} (expected '0' or '1')")]
    BadBit(char),
    #[error("invalid hex key {0:?}")]
    BadHex(String),
    #[error("hex key holds {available} bits, {requested} requested")]
    HexTooShort { available: usize, requested: usize },
    #[error("transfer length {0} outside 1..={MAX_TRANSFER_LENGTH}")]
    TransferLength(u32),
    #[error("encoding and base index must be complementary bits, got e={encoding} b={base}")]
    Indices { encoding: u8, base: u8 },
    #[error("key length {len} is shorter than max(T, 2) = {need}")]
    KeyTooShort { len: usize, need: usize },
}

/// The shared secret bits, fixed for the life of a session.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KeyMaterial {
    bits: Vec<u8>,
}

impl KeyMaterial {
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, KeyError> {
        if bits.is_empty() {
            return Err(KeyError::Empty);
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(KeyError::BadBit(char::from(b'0' + b.min(9))));
        }
        Ok(Self { bits })
    }

    /// Parses an ASCII string of `'0'`/`'1'`.
    pub fn from_bit_str(s: &str) -> Result<Self, KeyError> {
        let bits = s
            .trim()
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(KeyError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_bits(bits)
    }

    /// Takes the first `len` bits (most significant first) of a hex string.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self, KeyError> {
        let hex = hex.trim();
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for c in hex.chars() {
            let nibble = c.to_digit(16).ok_or_else(|| KeyError::BadHex(hex.to_string()))?;
            bits.extend((0..4).rev().map(|i| ((nibble >> i) & 1) as u8));
        }
        if len > bits.len() {
            return Err(KeyError::HexTooShort {
                available: bits.len(),
                requested: len,
            });
        }
        bits.truncate(len);
        Self::from_bits(bits)
    }

    /// Uniformly random key of `len` bits.
    pub fn random(len: usize, rng: &mut impl rand::Rng) -> Result<Self, KeyError> {
        Self::from_bits((0..len).map(|_| u8::from(rng.random::<bool>())).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Bit at `index` modulo the key length.
    pub fn bit_wrapping(&self, index: usize) -> u8 {
        self.bits[index % self.bits.len()]
    }
}

impl fmt::Debug for KeyMaterial {
    // Keys are secrets; only the length is printed.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "KeyMaterial({} bits)", self.bits.len())
    }
}

impl fmt::Display for KeyMaterial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

/// Accepts either `"1101"` or `"0x<hex>:<bits>"`.
impl FromStr for KeyMaterial {
    type Err = KeyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
            Some(rest) => {
                let (hex, len) = rest.split_once(':').ok_or_else(|| KeyError::BadHex(s.to_string()))?;
                let len = len.parse().map_err(|_| KeyError::BadHex(s.to_string()))?;
                Self::from_hex(hex, len)
            }
            None => Self::from_bit_str(s),
        }
    }
}

impl Serialize for KeyMaterial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for KeyMaterial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Per-session schedule parameters agreed before the first round.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSchedule", into = "RawSchedule")]
pub struct ScheduleConfig {
    transfer_length: u32,
    encoding_index: u8,
}

#[derive(Serialize, Deserialize)]
struct RawSchedule {
    transfer_length: u32,
    encoding_index: u8,
}

impl TryFrom<RawSchedule> for ScheduleConfig {
    type Error = KeyError;
    fn try_from(raw: RawSchedule) -> Result<Self, KeyError> {
        ScheduleConfig::new(raw.transfer_length, raw.encoding_index)
    }
}

impl From<ScheduleConfig> for RawSchedule {
    fn from(cfg: ScheduleConfig) -> Self {
        RawSchedule {
            transfer_length: cfg.transfer_length,
            encoding_index: cfg.encoding_index,
        }
    }
}

impl ScheduleConfig {
    /// The base index is implied: it is always `1 - encoding_index`.
    pub fn new(transfer_length: u32, encoding_index: u8) -> Result<Self, KeyError> {
        if !(1..=MAX_TRANSFER_LENGTH).contains(&transfer_length) {
            return Err(KeyError::TransferLength(transfer_length));
        }
        if encoding_index > 1 {
            return Err(KeyError::Indices {
                encoding: encoding_index,
                base: 1u8.wrapping_sub(encoding_index),
            });
        }
        Ok(Self {
            transfer_length,
            encoding_index,
        })
    }

    /// Explicit form; rejects indices that are not complementary.
    pub fn with_indices(transfer_length: u32, encoding_index: u8, base_index: u8) -> Result<Self, KeyError> {
        if encoding_index > 1 || base_index > 1 || encoding_index == base_index {
            return Err(KeyError::Indices {
                encoding: encoding_index,
                base: base_index,
            });
        }
        Self::new(transfer_length, encoding_index)
    }

    pub fn transfer_length(&self) -> u32 {
        self.transfer_length
    }

    pub fn encoding_index(&self) -> u8 {
        self.encoding_index
    }

    pub fn base_index(&self) -> u8 {
        1 - self.encoding_index
    }

    /// Largest window a single round can draw: `2^T - 1`.
    pub fn max_window(&self) -> u64 {
        (1u64 << self.transfer_length) - 1
    }

    /// Checks the key is long enough for this schedule.
    pub fn check_key(&self, key: &KeyMaterial) -> Result<(), KeyError> {
        let need = (self.transfer_length as usize).max(2);
        if key.len() < need {
            return Err(KeyError::KeyTooShort { len: key.len(), need });
        }
        Ok(())
    }
}

/// One of the four authentication states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AuthState {
    Zero,
    One,
    Plus,
    Minus,
}

impl AuthState {
    pub fn from_bits(encoding_bit: u8, basis: Basis) -> Self {
        match (encoding_bit, basis) {
            (0, Basis::Z) => AuthState::Zero,
            (_, Basis::Z) => AuthState::One,
            (0, Basis::X) => AuthState::Plus,
            (_, Basis::X) => AuthState::Minus,
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            AuthState::Zero | AuthState::One => Basis::Z,
            AuthState::Plus | AuthState::Minus => Basis::X,
        }
    }

    /// Eigenvalue bit in [`AuthState::basis`].
    pub fn bit(self) -> u8 {
        match self {
            AuthState::Zero | AuthState::Plus => 0,
            AuthState::One | AuthState::Minus => 1,
        }
    }

    pub fn ket(self) -> &'static str {
        match self {
            AuthState::Zero => "|0>",
            AuthState::One => "|1>",
            AuthState::Plus => "|+>",
            AuthState::Minus => "|->",
        }
    }
}

/// What one authentication round prepares and checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AuthPlan {
    pub encoding_bit: u8,
    pub base_bit: u8,
}

impl AuthPlan {
    pub fn basis(&self) -> Basis {
        if self.base_bit == 0 {
            Basis::Z
        } else {
            Basis::X
        }
    }

    pub fn expected_state(&self) -> AuthState {
        AuthState::from_bits(self.encoding_bit, self.basis())
    }
}

/// Positions into the key for the two independent readers.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeyCursors {
    r_cursor: usize,
    pair_cursor: usize,
    windows_drawn: u64,
    pairs_drawn: u64,
}

impl KeyCursors {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn r_cursor(&self) -> usize {
        self.r_cursor
    }

    pub fn pair_cursor(&self) -> usize {
        self.pair_cursor
    }

    pub fn windows_drawn(&self) -> u64 {
        self.windows_drawn
    }

    pub fn pairs_drawn(&self) -> u64 {
        self.pairs_drawn
    }

    /// Reads the next `T`-bit window, most significant bit first.
    pub fn next_r(&mut self, key: &KeyMaterial, cfg: &ScheduleConfig) -> u64 {
        let t = cfg.transfer_length as usize;
        let r = (0..t).fold(0u64, |acc, i| (acc << 1) | u64::from(key.bit_wrapping(self.r_cursor + i)));
        self.r_cursor = (self.r_cursor + t) % key.len();
        self.windows_drawn += 1;
        r
    }

    /// Reads the next bit pair and splits it by the encoding / base indices.
    pub fn next_auth_pair(&mut self, key: &KeyMaterial, cfg: &ScheduleConfig) -> AuthPlan {
        let pair = [key.bit_wrapping(self.pair_cursor), key.bit_wrapping(self.pair_cursor + 1)];
        self.pair_cursor = (self.pair_cursor + 2) % key.len();
        self.pairs_drawn += 1;
        AuthPlan {
            encoding_bit: pair[cfg.encoding_index() as usize],
            base_bit: pair[cfg.base_index() as usize],
        }
    }
}

/// Average number of data qubits one pass over an `L`-bit key carries with
/// transfer length `T`: the mean window `(2^T - 1) / 2` times the number of
/// whole windows `floor(L / T)`, floored. Integer arithmetic throughout.
pub fn capacity(key_length: u64, transfer_length: u32) -> u64 {
    assert!(transfer_length >= 1, "transfer length must be positive");
    let windows = u128::from(rounds_per_pass(key_length, transfer_length));
    let max_window = (1u128 << transfer_length) - 1;
    (max_window * windows / 2) as u64
}

/// Number of complete `T`-bit windows in one pass over the key.
pub fn rounds_per_pass(key_length: u64, transfer_length: u32) -> u64 {
    key_length / u64::from(transfer_length)
}
