use rand::Rng;

use crate::duality::TwoParticleScenario;
use crate::interferometer::ScenarioSpec;
use crate::linalg::ComplexMatrix;
use crate::random::{ginibre, haar_vector, substream};

/// Haar-random scenario: a Haar-uniform pure particle-memory state and
/// independent Haar-uniform detector states.
pub fn sample_scenario(seed: u64, n: usize, d_b: usize, d_d: usize) -> ScenarioSpec {
    sample_scenario_with(&mut substream(seed, &[]), n, d_b, d_d)
}

pub fn sample_scenario_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d_b: usize,
    d_d: usize,
) -> ScenarioSpec {
    assert!(n >= 2 && d_b >= 1 && d_d >= 1, "sample_scenario needs n >= 2");
    let amps = normalized(ginibre(rng, n, d_b));
    let detector = (0..n).map(|_| haar_vector(rng, d_d)).collect();
    ScenarioSpec::new(amps, detector).expect("sampled scenario is valid")
}

pub fn sample_two_particle(seed: u64, n: usize, d_d: usize) -> TwoParticleScenario {
    sample_two_particle_with(&mut substream(seed, &[]), n, d_d)
}

pub fn sample_two_particle_with<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    d_d: usize,
) -> TwoParticleScenario {
    assert!(n >= 2 && d_d >= 1, "sample_two_particle needs n >= 2");
    let amps = normalized(ginibre(rng, n, n));
    let da = (0..n).map(|_| haar_vector(rng, d_d)).collect();
    let db = (0..n).map(|_| haar_vector(rng, d_d)).collect();
    TwoParticleScenario::new(amps, da, db).expect("sampled scenario is valid")
}

fn normalized(m: ComplexMatrix) -> ComplexMatrix {
    let f = m.frobenius_norm();
    m.scale(1.0 / f)
}
