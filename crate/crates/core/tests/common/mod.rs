//! Independent closed-form and dynamic-programming oracles.
#![allow(dead_code)]

/// Probability that one forward authentication round fails against an
/// intercept-resend node, by enumerating Alice's basis, Eve's basis and her outcome.
/// `eve_x` is the probability Eve measures in X.
pub fn per_round_detection(eve_x: f64) -> f64 {
    let mut p = 0.0;
    // Alice's basis comes from a uniform key bit; the encoded bit does not matter.
    for alice_x in [false, true] {
        for eve_is_x in [false, true] {
            let p_basis = if eve_is_x { eve_x } else { 1.0 - eve_x };
            // Same basis: forwarded state is the original. Otherwise each
            // outcome is equally likely and Alice reads a fair coin.
            let p_wrong_bit = if eve_is_x == alice_x { 0.0 } else { 0.5 };
            p += 0.5 * p_basis * p_wrong_bit;
        }
    }
    p
}

#[derive(Clone, Copy, Debug)]
pub struct CampaignOracle {
    /// Probability a session is detected before delivering the target.
    pub detection: f64,
    /// Mean round index of the failing round, given detection.
    pub mean_rounds: f64,
    /// Mean data qubits delivered at detection, given detection.
    pub mean_leakage: f64,
    /// Mean rounds to finish, given completion.
    pub mean_rounds_complete: f64,
}

/// Exact session statistics when every window is uniform on `0..2^T`, a
/// partial final window still gets its closing authentication round, and
/// each round fails independently with probability `p`.
pub fn campaign(t: u32, target: usize, p: f64) -> CampaignOracle {
    let windows = 1usize << t;
    let w = 1.0 / windows as f64;
    // mass[n]: probability of being alive with n qubits delivered.
    let mut mass = vec![0.0; target + 1];
    mass[0] = 1.0;
    let (mut det, mut det_rounds, mut det_leak) = (0.0, 0.0, 0.0);
    let (mut done, mut done_rounds) = (0.0, 0.0);
    if target == 0 {
        return CampaignOracle { detection: 0.0, mean_rounds: f64::NAN, mean_leakage: f64::NAN, mean_rounds_complete: 0.0 };
    }
    for round in 1.. {
        let alive: f64 = mass.iter().sum();
        if alive < 1e-16 {
            break;
        }
        let mut next = vec![0.0; target + 1];
        for (n, &m) in mass.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for r in 0..windows {
                let d = r.min(target - n);
                let share = m * w;
                det += share * p;
                det_rounds += share * p * round as f64;
                det_leak += share * p * (n + d) as f64;
                let survive = share * (1.0 - p);
                if n + d == target {
                    done += survive;
                    done_rounds += survive * round as f64;
                } else {
                    next[n + d] += survive;
                }
            }
        }
        mass = next;
    }
    CampaignOracle {
        detection: det,
        mean_rounds: det_rounds / det,
        mean_leakage: det_leak / det,
        mean_rounds_complete: done_rounds / done,
    }
}
