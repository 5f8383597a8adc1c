use proptest::prelude::*;
use qauth::key::rounds_per_pass;
use qauth::{capacity, AuthState, KeyCursors, KeyMaterial, ScheduleConfig};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

fn key_from_int(v: u32, len: usize) -> KeyMaterial {
    KeyMaterial::from_bits((0..len).rev().map(|i| ((v >> i) & 1) as u8).collect()).unwrap()
}

/// Hand-unrolled window: bits i*T .. i*T+T-1 modulo L, most significant first.
fn window_oracle(bits: &[u8], t: usize, i: usize) -> u64 {
    (0..t).fold(0, |acc, j| (acc << 1) | u64::from(bits[(i * t + j) % bits.len()]))
}

#[test]
fn capacity_matches_mean_over_all_keys() {
    for len in 2..=8usize {
        for t in 1..=len as u32 {
            let cfg = ScheduleConfig::new(t, 0).unwrap();
            let passes = rounds_per_pass(len as u64, t);
            let mut total: u64 = 0;
            for v in 0..(1u32 << len) {
                let key = key_from_int(v, len);
                let mut cur = KeyCursors::new();
                total += (0..passes).map(|_| cur.next_r(&key, &cfg)).sum::<u64>();
            }
            let keys = 1u64 << len;
            let mean = total as f64 / keys as f64;
            assert_eq!(total / keys, capacity(len as u64, t), "L={len} T={t} mean={mean}");
            assert!((mean - capacity(len as u64, t) as f64) < 1.0);
        }
    }
}

#[test]
fn capacities_for_a_1024_bit_key() {
    assert_eq!(capacity(1024, 2), 768);
    assert_eq!(capacity(1024, 3), 1193);
    assert_eq!(capacity(1024, 1), 512);
    assert_eq!(capacity(4, 4), 7);
    assert_eq!(rounds_per_pass(1024, 3), 341);
}

#[test]
fn short_key_wrap_sequence() {
    let key: KeyMaterial = "101".parse().unwrap();
    let cfg = ScheduleConfig::new(2, 0).unwrap();
    let mut cur = KeyCursors::new();
    let got: Vec<u64> = (0..6).map(|_| cur.next_r(&key, &cfg)).collect();
    let want: Vec<u64> = (0..6).map(|i| window_oracle(key.bits(), 2, i)).collect();
    assert_eq!(got, want);
    assert_eq!(got, [2, 3, 1, 2, 3, 1]);
}

#[test]
fn worked_example_schedule() {
    let key: KeyMaterial = "1101".parse().unwrap();
    let cfg = ScheduleConfig::new(2, 0).unwrap();
    let mut cur = KeyCursors::new();
    assert_eq!(cur.next_r(&key, &cfg), 3);
    assert_eq!(cur.next_auth_pair(&key, &cfg).expected_state(), AuthState::Minus);
    assert_eq!(cur.next_r(&key, &cfg), 1);
    assert_eq!(cur.next_auth_pair(&key, &cfg).expected_state(), AuthState::Plus);
}

proptest! {
    #[test]
    fn windows_match_oracle_and_stay_in_range(bits in prop::collection::vec(0u8..2, 2..40), t in 1u32..6) {
        prop_assume!(bits.len() >= t as usize);
        let key = KeyMaterial::from_bits(bits.clone()).unwrap();
        let cfg = ScheduleConfig::new(t, 0).unwrap();
        let mut cur = KeyCursors::new();
        for i in 0..100 {
            let r = cur.next_r(&key, &cfg);
            prop_assert!(r <= cfg.max_window());
            prop_assert_eq!(r, window_oracle(&bits, t as usize, i));
        }
    }

    #[test]
    fn window_sequence_is_periodic(bits in prop::collection::vec(0u8..2, 2..24), t in 1u32..6) {
        prop_assume!(bits.len() >= t as usize);
        let len = bits.len();
        let period = len * t as usize / gcd(len, t as usize) / t as usize;
        let key = KeyMaterial::from_bits(bits).unwrap();
        let cfg = ScheduleConfig::new(t, 0).unwrap();
        let mut cur = KeyCursors::new();
        let seq: Vec<u64> = (0..3 * period).map(|_| cur.next_r(&key, &cfg)).collect();
        for i in period..seq.len() {
            prop_assert_eq!(seq[i], seq[i - period]);
        }
    }

    #[test]
    fn cursors_are_independent(bits in prop::collection::vec(0u8..2, 4..32), t in 1u32..5, e in 0u8..2, interleave in prop::collection::vec(any::<bool>(), 0..60)) {
        let key = KeyMaterial::from_bits(bits).unwrap();
        let cfg = ScheduleConfig::new(t, e).unwrap();
        let mut mixed = KeyCursors::new();
        let (mut rs, mut plans) = (Vec::new(), Vec::new());
        for draw_r in interleave {
            if draw_r {
                rs.push(mixed.next_r(&key, &cfg));
            } else {
                plans.push(mixed.next_auth_pair(&key, &cfg));
            }
        }
        let mut only = KeyCursors::new();
        let rs_alone: Vec<u64> = rs.iter().map(|_| only.next_r(&key, &cfg)).collect();
        let plans_alone: Vec<_> = plans.iter().map(|_| only.next_auth_pair(&key, &cfg)).collect();
        prop_assert_eq!(rs, rs_alone);
        prop_assert_eq!(plans, plans_alone);
    }

    #[test]
    fn schedule_is_deterministic(bits in prop::collection::vec(0u8..2, 4..32), t in 1u32..5, e in 0u8..2) {
        let key = KeyMaterial::from_bits(bits).unwrap();
        let cfg = ScheduleConfig::new(t, e).unwrap();
        let draw = || {
            let mut c = KeyCursors::new();
            (0..50).map(|_| (c.next_r(&key, &cfg), c.next_auth_pair(&key, &cfg))).collect::<Vec<_>>()
        };
        prop_assert_eq!(draw(), draw());
    }

    #[test]
    fn hex_and_bit_forms_agree(v: u32) {
        let hex = format!("0x{v:08x}:32");
        let bin = format!("{v:032b}");
        prop_assert_eq!(hex.parse::<KeyMaterial>().unwrap(), bin.parse::<KeyMaterial>().unwrap());
    }
}
