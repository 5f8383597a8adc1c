//! Teleports random states directly and across repeater chains, and reports
//! the worst overlap error seen.

use qauth::qsim::{Amplitude, RngStream, Simulator};

fn random_state(rng: &mut RngStream) -> [Amplitude; 2] {
    let theta = std::f64::consts::PI * rng.uniform();
    let phi = 2.0 * std::f64::consts::PI * rng.uniform();
    [Amplitude::new((theta / 2.0).cos(), 0.0), Amplitude::from_polar((theta / 2.0).sin(), phi)]
}

fn fidelity(a: &[Amplitude; 2], b: &[Amplitude; 2]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr()
}

/// Builds an end-to-end pair over `hops` links by swapping left to right.
fn chained_pair(sim: &mut Simulator, hops: usize, rng: &mut RngStream) -> Result<(qauth::QubitRef, qauth::QubitRef), qauth::qsim::QsimError> {
    let (alice, mut far) = sim.make_bell_pair()?;
    for _ in 1..hops {
        let (near, next) = sim.make_bell_pair()?;
        let bits = sim.entanglement_swap(far, near, rng)?;
        sim.apply_correction(next, bits)?;
        far = next;
    }
    Ok((alice, far))
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = RngStream::new(11);
    let mut sim = Simulator::new();
    for hops in 1..=5 {
        let mut worst: f64 = 0.0;
        for _ in 0..100 {
            let psi = random_state(&mut rng);
            let payload = sim.allocate_with(psi)?;
            let (local, remote) = chained_pair(&mut sim, hops, &mut rng)?;
            let (out, _) = sim.teleport(payload, local, remote, &mut rng)?;
            let got = sim.single_qubit_amplitudes(out)?.expect("teleported qubit is unentangled");
            worst = worst.max(1.0 - fidelity(&psi, &got));
            sim.discard(out, &mut rng)?;
        }
        println!("links={hops} swaps={} worst 1-F = {worst:.2e}", hops - 1);
    }
    Ok(())
}
