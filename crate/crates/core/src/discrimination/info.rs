//! Information-theoretic path information: `I(D:M)`, Holevo quantity, and a
//! search-based lower bound on accessible information.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{shannon_entropy, von_neumann_entropy, ComplexMatrix};
use crate::random::{haar_vector, substream};

use super::ensemble::{Ensemble, Povm};
use super::min_error::{min_error_solve, pretty_good_measurement, SolverOptions};

/// Joint distribution `p(D=i, M=j) = p_i ⟨φ_i|Π_j|φ_i⟩`, row-major `N × m`.
pub fn joint_distribution(e: &Ensemble, m: &Povm) -> Result<Vec<Vec<f64>>> {
    if e.dim() != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states have dimension {}, POVM acts on {}",
            e.dim(),
            m.dim()
        )));
    }
    Ok(e.probs()
        .iter()
        .zip(e.states())
        .map(|(p, phi)| {
            m.elements()
                .iter()
                .map(|pi| (p * pi.sandwich(phi, phi).re).max(0.0))
                .collect()
        })
        .collect())
}

/// `I(D:M) = H(D) + H(M) - H(D,M)` in bits.
pub fn mutual_information(e: &Ensemble, m: &Povm) -> Result<f64> {
    let joint = joint_distribution(e, m)?;
    Ok(mutual_information_of(&joint))
}

fn mutual_information_of(joint: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..joint[0].len())
        .map(|j| joint.iter().map(|r| r[j]).sum())
        .collect();
    let flat: Vec<f64> = joint.iter().flatten().copied().collect();
    (shannon_entropy(&rows) + shannon_entropy(&cols) - shannon_entropy(&flat)).max(0.0)
}

/// `S(ρ) - Σ p_i S(|φ_i⟩⟨φ_i|) = S(ρ)` for pure members.
pub fn holevo(e: &Ensemble) -> f64 {
    von_neumann_entropy(&e.average_state())
}

#[derive(Debug, Clone)]
pub struct AccessibleEstimate {
    /// Best mutual information found (bits).
    pub value: f64,
    pub povm: Povm,
    pub source: AccessibleSource,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessibleSource {
    MinError,
    PrettyGood,
    /// Random start `k` after coordinate ascent.
    Restart(usize),
}

/// Lower bound on `Acc(D) = max_POVM I(D:M)` with a fixed internal seed.
pub fn accessible_info_lower(e: &Ensemble, restarts: usize) -> f64 {
    accessible_info_search(e, restarts, 0).value
}

/// Best `I(D:M)` over the min-error POVM, the pretty good measurement and
/// `restarts` random rank-one POVMs refined by coordinate ascent. Restart
/// `k` draws from its own substream, so the value never decreases as
/// `restarts` grows.
pub fn accessible_info_search(e: &Ensemble, restarts: usize, seed: u64) -> AccessibleEstimate {
    let min_error = min_error_solve(e, SolverOptions::default()).povm;
    let mut best = AccessibleEstimate {
        value: mutual_information(e, &min_error).expect("shapes match"),
        povm: min_error,
        source: AccessibleSource::MinError,
    };
    let pgm = pretty_good_measurement(e);
    let v = mutual_information(e, &pgm).expect("shapes match");
    if v > best.value {
        best = AccessibleEstimate {
            value: v,
            povm: pgm,
            source: AccessibleSource::PrettyGood,
        };
    }
    let outcomes = e.len().max(e.dim());
    for k in 0..restarts {
        let mut rng = substream(seed, &[0xacc, k as u64]);
        let (value, povm) = coordinate_ascent(e, outcomes, &mut rng);
        if value > best.value {
            best = AccessibleEstimate {
                value,
                povm,
                source: AccessibleSource::Restart(k),
            };
        }
    }
    best
}

fn rank_one_povm(vectors: &[Vec<Complex64>]) -> Option<Povm> {
    Povm::normalized_from(vectors.iter().map(|v| ComplexMatrix::projector(v)).collect()).ok()
}

fn score(e: &Ensemble, vectors: &[Vec<Complex64>]) -> (f64, Option<Povm>) {
    match rank_one_povm(vectors) {
        Some(p) => (mutual_information(e, &p).unwrap_or(0.0), Some(p)),
        None => (f64::NEG_INFINITY, None),
    }
}

const ASCENT_MAX_PASSES: usize = 40;
const ASCENT_MIN_STEP: f64 = 1e-4;

/// Pattern search over the real and imaginary parts of the seed vectors of
/// a rank-one POVM `Π_k ∝ S^{-1/2}|v_k⟩⟨v_k|S^{-1/2}`.
fn coordinate_ascent<R: Rng + ?Sized>(e: &Ensemble, outcomes: usize, rng: &mut R) -> (f64, Povm) {
    let d = e.dim();
    let mut vectors: Vec<Vec<Complex64>> = (0..outcomes).map(|_| haar_vector(rng, d)).collect();
    let (mut value, mut povm) = score(e, &vectors);
    let mut step = 0.25;
    for _ in 0..ASCENT_MAX_PASSES {
        let mut improved = false;
        for k in 0..outcomes {
            for c in 0..d {
                for part in 0..2 {
                    for sign in [1.0, -1.0] {
                        let delta = if part == 0 {
                            Complex64::new(sign * step, 0.0)
                        } else {
                            Complex64::new(0.0, sign * step)
                        };
                        vectors[k][c] += delta;
                        let (v, p) = score(e, &vectors);
                        if v > value + 1e-15 {
                            value = v;
                            povm = p;
                            improved = true;
                            break;
                        }
                        vectors[k][c] -= delta;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < ASCENT_MIN_STEP {
                break;
            }
        }
    }
    let povm = povm.unwrap_or_else(|| Povm::trivial(outcomes, d));
    (value.max(0.0), povm)
}
