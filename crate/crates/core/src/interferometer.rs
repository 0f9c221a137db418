//! Particle-memory state preparation, the controlled-unitary which-path
//! detector, and the reduced states seen by each party.
//!
//! A scenario is fixed by the amplitude table `a_ij` of the particle (path
//! `i`) and memory (basis state `j`) together with the detector state
//! `|φ_i⟩` imprinted by path `i`. After the interaction the global state is
//! `Σ_i √p_i |i⟩_A |u_i⟩_B |φ_i⟩_D`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, eigh, inner, norm, reduce_pure, ComplexMatrix, DensityMatrix, DimsLabel,
    EIGEN_CLIP_TOL, HERMITIAN_TOL, NORM_TOL, ZERO,
};

pub const PARTICLE: &str = "A";
pub const MEMORY: &str = "B";
pub const DETECTOR: &str = "D";

/// One interferometer run: path amplitudes with the memory, and the
/// detector state each path leaves behind.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    amplitudes: ComplexMatrix,
    detector_states: Vec<Vec<Complex64>>,
}

impl ScenarioSpec {
    /// `amplitudes` is the `N × d_B` table `a_ij`; `detector_states` holds the
    /// `N` unit vectors `|φ_i⟩`, all of the same dimension `d_D`.
    pub fn new(amplitudes: ComplexMatrix, detector_states: Vec<Vec<Complex64>>) -> Result<Self> {
        let n = amplitudes.rows();
        if n < 2 {
            return Err(Error::InvalidScenario(format!("need at least 2 paths, got {n}")));
        }
        if amplitudes.cols() == 0 {
            return Err(Error::InvalidScenario("memory dimension must be at least 1".into()));
        }
        let total: f64 = amplitudes.data().iter().map(|z| z.norm_sqr()).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "amplitude table".into(),
                norm: total.sqrt(),
            });
        }
        check_unit_vectors(&detector_states, n, "detector state")?;
        Ok(Self {
            amplitudes,
            detector_states,
        })
    }

    /// Detector states realized from their overlap (Gram) matrix, `d_D = N`.
    pub fn with_detector_gram(amplitudes: ComplexMatrix, gram: &ComplexMatrix) -> Result<Self> {
        Self::new(amplitudes, gram_to_states(gram)?)
    }

    /// Memoryless scenario with amplitudes `√p_i` and the given detector states.
    pub fn memoryless(probs: &[f64], detector_states: Vec<Vec<Complex64>>) -> Result<Self> {
        let amps = probs
            .iter()
            .map(|&p| Complex64::new(p.max(0.0).sqrt(), 0.0))
            .collect();
        Self::new(ComplexMatrix::new(probs.len(), 1, amps)?, detector_states)
    }

    pub fn n(&self) -> usize {
        self.amplitudes.rows()
    }

    pub fn d_b(&self) -> usize {
        self.amplitudes.cols()
    }

    pub fn d_d(&self) -> usize {
        self.detector_states[0].len()
    }

    pub fn amplitudes(&self) -> &ComplexMatrix {
        &self.amplitudes
    }

    pub fn detector_states(&self) -> &[Vec<Complex64>] {
        &self.detector_states
    }

    /// Path probabilities `p_i = Σ_j |a_ij|²`.
    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.n())
            .map(|i| (0..self.d_b()).map(|j| self.amplitudes[(i, j)].norm_sqr()).sum())
            .collect()
    }

    /// Normalized memory states `|u_i⟩`; unoccupied paths get `|0⟩_B`.
    pub fn memory_states(&self) -> Vec<Vec<Complex64>> {
        self.probabilities()
            .iter()
            .enumerate()
            .map(|(i, &p)| {
                if p > 0.0 {
                    let s = p.sqrt();
                    (0..self.d_b()).map(|j| self.amplitudes[(i, j)] / s).collect()
                } else {
                    basis_vector(self.d_b(), 0)
                }
            })
            .collect()
    }

    /// `G[i][j] = ⟨φ_i|φ_j⟩`
    pub fn detector_overlaps(&self) -> ComplexMatrix {
        gram_of(&self.detector_states)
    }

    /// `G[i][j] = ⟨u_i|u_j⟩`
    pub fn memory_overlaps(&self) -> ComplexMatrix {
        gram_of(&self.memory_states())
    }

    /// The same detector with the memory removed: `|ψ̃⟩ = Σ_i √p_i |i⟩`.
    pub fn without_memory(&self) -> ScenarioSpec {
        Self::memoryless(&self.probabilities(), self.detector_states.clone())
            .expect("probabilities of a valid scenario are normalized")
    }

    /// True when every `|u_i⟩` of an occupied path equals the others up to phase.
    pub fn has_product_memory(&self, tol: f64) -> bool {
        let p = self.probabilities();
        let u = self.memory_states();
        let occupied: Vec<usize> = (0..self.n()).filter(|&i| p[i] > 0.0).collect();
        occupied
            .windows(2)
            .all(|w| (inner(&u[w[0]], &u[w[1]]).norm() - 1.0).abs() <= tol)
    }

    pub fn dims(&self) -> DimsLabel {
        DimsLabel::new([(PARTICLE, self.n()), (MEMORY, self.d_b()), (DETECTOR, self.d_d())])
            .expect("scenario dimensions are positive")
    }

    pub fn particle_memory_dims(&self) -> DimsLabel {
        DimsLabel::new([(PARTICLE, self.n()), (MEMORY, self.d_b())])
            .expect("scenario dimensions are positive")
    }
}

pub(crate) fn check_unit_vectors(states: &[Vec<Complex64>], count: usize, what: &str) -> Result<()> {
    if states.len() != count {
        return Err(Error::InvalidScenario(format!(
            "expected {count} {what}s, got {}",
            states.len()
        )));
    }
    let dim = states[0].len();
    if dim == 0 {
        return Err(Error::InvalidScenario(format!("{what}s must have dimension >= 1")));
    }
    for (i, s) in states.iter().enumerate() {
        if s.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{what} {i} has dimension {}, expected {dim}",
                s.len()
            )));
        }
        if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(format!("{what} {i}")));
        }
        let nrm = norm(s);
        if (nrm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                what: format!("{what} {i}"),
                norm: nrm,
            });
        }
    }
    Ok(())
}

fn gram_of(states: &[Vec<Complex64>]) -> ComplexMatrix {
    let n = states.len();
    let mut g = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = inner(&states[i], &states[j]);
        }
    }
    g
}

/// Unit-norm state vector on labelled subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: DimsLabel,
    vector: Vec<Complex64>,
}

impl PureState {
    pub fn new(dims: DimsLabel, vector: Vec<Complex64>) -> Result<Self> {
        if vector.len() != dims.total() {
            return Err(Error::DimensionMismatch(format!(
                "state has {} amplitudes, labels need {}",
                vector.len(),
                dims.total()
            )));
        }
        let nrm = norm(&vector);
        if (nrm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                what: "pure state".into(),
                norm: nrm,
            });
        }
        Ok(Self { dims, vector })
    }

    pub fn dims(&self) -> &DimsLabel {
        &self.dims
    }

    pub fn vector(&self) -> &[Complex64] {
        &self.vector
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.vector).expect("pure state is normalized")
    }

    /// Reduced state on `keep`, traced straight from the amplitudes.
    pub fn reduced(&self, keep: &[&str]) -> Result<DensityMatrix> {
        DensityMatrix::new(reduce_pure(&self.vector, &self.dims, keep)?)
    }
}

/// `|ψ⟩_AB = Σ_i √p_i |i⟩_A |u_i⟩_B`
pub fn build_initial_state(spec: &ScenarioSpec) -> Result<PureState> {
    let p = spec.probabilities();
    let u = spec.memory_states();
    let (n, d_b) = (spec.n(), spec.d_b());
    let mut psi = vec![ZERO; n * d_b];
    for i in 0..n {
        let w = p[i].sqrt();
        for j in 0..d_b {
            psi[i * d_b + j] = u[i][j] * w;
        }
    }
    PureState::new(spec.particle_memory_dims(), psi)
}

/// Applies `U |i⟩_A |φ_0⟩_D = |i⟩_A |φ_i⟩_D` to the particle-memory state.
pub fn apply_detector(state: &PureState, spec: &ScenarioSpec) -> Result<PureState> {
    if state.dims() != &spec.particle_memory_dims() {
        return Err(Error::DimensionMismatch(format!(
            "state labels {:?} do not match scenario A:{} B:{}",
            state.dims().dims(),
            spec.n(),
            spec.d_b()
        )));
    }
    let (n, d_b, d_d) = (spec.n(), spec.d_b(), spec.d_d());
    let mut out = vec![ZERO; n * d_b * d_d];
    for i in 0..n {
        let phi = &spec.detector_states()[i];
        for j in 0..d_b {
            let a = state.vector()[i * d_b + j];
            for (k, f) in phi.iter().enumerate() {
                out[(i * d_b + j) * d_d + k] = a * f;
            }
        }
    }
    PureState::new(spec.dims(), out)
}

/// Every reduced state of the post-interaction scenario.
#[derive(Debug, Clone)]
pub struct ReducedSet {
    pub rho_ab: DensityMatrix,
    pub rho_a: DensityMatrix,
    pub rho_d: DensityMatrix,
    pub rho_bd: Option<DensityMatrix>,
    pub probabilities: Vec<f64>,
    /// `⟨φ_i|φ_j⟩`
    pub detector_overlaps: ComplexMatrix,
    /// `⟨u_i|u_j⟩`
    pub memory_overlaps: ComplexMatrix,
}

pub fn reduce_all(state: &PureState, spec: &ScenarioSpec) -> Result<ReducedSet> {
    if state.dims() != &spec.dims() {
        return Err(Error::DimensionMismatch(
            "reduce_all needs the particle-memory-detector state of this scenario".into(),
        ));
    }
    Ok(ReducedSet {
        rho_ab: state.reduced(&[PARTICLE, MEMORY])?,
        rho_a: state.reduced(&[PARTICLE])?,
        rho_d: state.reduced(&[DETECTOR])?,
        rho_bd: Some(state.reduced(&[MEMORY, DETECTOR])?),
        probabilities: spec.probabilities(),
        detector_overlaps: spec.detector_overlaps(),
        memory_overlaps: spec.memory_overlaps(),
    })
}

/// Build, interact and reduce in one go.
pub fn analyze(spec: &ScenarioSpec) -> Result<(PureState, ReducedSet)> {
    let full = apply_detector(&build_initial_state(spec)?, spec)?;
    let reduced = reduce_all(&full, spec)?;
    Ok((full, reduced))
}

/// A mixed particle state without memory, purified by the scenario's memory.
#[derive(Debug, Clone)]
pub struct MixedNoMemory {
    /// `ρ⁰_A = Σ √(p_i p_j) ⟨u_j|u_i⟩ |i⟩⟨j|`
    pub rho0_a: DensityMatrix,
    /// `U (ρ⁰_A ⊗ |φ_0⟩⟨φ_0|) U†`
    pub rho_ad: DensityMatrix,
    pub rho_a: DensityMatrix,
    pub rho_d: DensityMatrix,
}

pub fn build_mixed_no_memory(spec: &ScenarioSpec) -> Result<MixedNoMemory> {
    let initial = build_initial_state(spec)?;
    let rho0_a = initial.reduced(&[PARTICLE])?;
    let (n, d_d) = (spec.n(), spec.d_d());
    let phis = spec.detector_states();
    let mut m = ComplexMatrix::zeros(n * d_d, n * d_d);
    for i in 0..n {
        for j in 0..n {
            let r = rho0_a.get(i, j);
            if r == ZERO {
                continue;
            }
            for a in 0..d_d {
                for b in 0..d_d {
                    m[(i * d_d + a, j * d_d + b)] = r * phis[i][a] * phis[j][b].conj();
                }
            }
        }
    }
    let rho_ad = DensityMatrix::new(m)?;
    let dims = DimsLabel::new([(PARTICLE, n), (DETECTOR, d_d)])?;
    let rho_a = crate::linalg::partial_trace(&rho_ad, &dims, &[PARTICLE])?;
    let rho_d = crate::linalg::partial_trace(&rho_ad, &dims, &[DETECTOR])?;
    Ok(MixedNoMemory {
        rho0_a,
        rho_ad,
        rho_a,
        rho_d,
    })
}

/// Unit vectors whose overlaps `⟨v_i|v_j⟩` reproduce a PSD unit-diagonal Gram
/// matrix. Output dimension is `N`; coordinates past the rank are zero.
pub fn gram_to_states(g: &ComplexMatrix) -> Result<Vec<Vec<Complex64>>> {
    if !g.is_square() {
        return Err(Error::DimensionMismatch("Gram matrix must be square".into()));
    }
    let deviation = g.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = g.rows();
    for i in 0..n {
        if (g[(i, i)].re - 1.0).abs() > NORM_TOL || g[(i, i)].im.abs() > NORM_TOL {
            return Err(Error::InvalidScenario(format!(
                "Gram matrix diagonal entry {i} is {}, expected 1",
                g[(i, i)]
            )));
        }
    }
    let e = eigh(g)?;
    if e.min() < -EIGEN_CLIP_TOL {
        return Err(Error::NotPositive {
            min_eigenvalue: e.min(),
        });
    }
    // largest eigenvalues first so the first rank(g) coordinates carry the states
    let order: Vec<usize> = (0..n).rev().collect();
    let mut states: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            order
                .iter()
                .map(|&k| e.vectors[(i, k)].conj() * e.values[k].max(0.0).sqrt())
                .collect()
        })
        .collect();
    for s in &mut states {
        let nrm = norm(s);
        for z in s.iter_mut() {
            *z /= nrm;
        }
    }
    Ok(states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{purity, ONE};

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn orthonormal(n: usize) -> Vec<Vec<Complex64>> {
        (0..n).map(|i| basis_vector(n, i)).collect()
    }

    #[test]
    fn product_memory_initial_state() {
        let amps = ComplexMatrix::from_real(2, 1, &[H, H]).unwrap();
        let spec = ScenarioSpec::new(amps, orthonormal(2)).unwrap();
        assert_eq!(spec.d_b(), 1);
        let psi = build_initial_state(&spec).unwrap();
        assert!((psi.vector()[0] - c(H)).norm() < 1e-15);
        assert!((psi.vector()[1] - c(H)).norm() < 1e-15);
    }

    #[test]
    fn bell_memory_has_half_purity() {
        let amps = ComplexMatrix::from_real(2, 2, &[H, 0.0, 0.0, H]).unwrap();
        let spec = ScenarioSpec::new(amps, vec![vec![ONE], vec![ONE]]).unwrap();
        let psi = build_initial_state(&spec).unwrap();
        let ra = psi.reduced(&[PARTICLE]).unwrap();
        assert!((purity(&ra) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_detector_marks_paths() {
        let amps = ComplexMatrix::from_real(2, 2, &[H, 0.0, 0.0, H]).unwrap();
        let spec = ScenarioSpec::new(amps, orthonormal(2)).unwrap();
        let (_, red) = analyze(&spec).unwrap();
        assert!((purity(&red.rho_a) - 0.5).abs() < 1e-15);
        assert!(red.rho_a.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn identical_detector_states_factor_out() {
        let amps = ComplexMatrix::from_real(3, 2, &[0.5, 0.1, 0.3, 0.5, 0.2, 0.0])
            .unwrap()
            .scale(1.0 / (0.25f64 + 0.01 + 0.09 + 0.25 + 0.04).sqrt());
        let phi = vec![c(0.6), Complex64::new(0.0, 0.8)];
        let spec = ScenarioSpec::new(amps, vec![phi.clone(); 3]).unwrap();
        let before = build_initial_state(&spec).unwrap().reduced(&[PARTICLE, MEMORY]).unwrap();
        let (_, red) = analyze(&spec).unwrap();
        assert!(red.rho_ab.matrix().max_abs_diff(before.matrix()) < 1e-15);
    }

    #[test]
    fn zero_probability_path_is_allowed() {
        let amps = ComplexMatrix::from_real(3, 2, &[H, 0.0, 0.0, 0.0, 0.0, H]).unwrap();
        let spec = ScenarioSpec::new(amps, orthonormal(3)).unwrap();
        assert_eq!(spec.probabilities()[1], 0.0);
        assert_eq!(spec.memory_states()[1], basis_vector(2, 0));
        let (full, red) = analyze(&spec).unwrap();
        assert!((norm(full.vector()) - 1.0).abs() < 1e-15);
        assert_eq!(red.rho_a.diagonal()[1], 0.0);
    }

    #[test]
    fn scenario_validation() {
        let bad_norm = ComplexMatrix::from_real(2, 1, &[1.0, 1.0]).unwrap();
        assert!(matches!(
            ScenarioSpec::new(bad_norm, orthonormal(2)),
            Err(Error::NotNormalized { .. })
        ));
        let one_path = ComplexMatrix::from_real(1, 1, &[1.0]).unwrap();
        assert!(ScenarioSpec::new(one_path, orthonormal(1)).is_err());
        let amps = ComplexMatrix::from_real(2, 1, &[H, H]).unwrap();
        assert!(ScenarioSpec::new(amps.clone(), orthonormal(3)).is_err());
        assert!(ScenarioSpec::new(amps, vec![vec![ONE], vec![ONE, ZERO]]).is_err());
    }

    #[test]
    fn apply_detector_checks_dims() {
        let amps = ComplexMatrix::from_real(2, 1, &[H, H]).unwrap();
        let spec = ScenarioSpec::new(amps, orthonormal(2)).unwrap();
        let wrong = PureState::new(
            DimsLabel::new([(PARTICLE, 2), (MEMORY, 2)]).unwrap(),
            vec![ONE, ZERO, ZERO, ZERO],
        )
        .unwrap();
        assert!(matches!(apply_detector(&wrong, &spec), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn dephased_mixed_input_has_no_coherence() {
        let amps = ComplexMatrix::from_real(2, 2, &[H, 0.0, 0.0, H]).unwrap();
        let g = ComplexMatrix::from_real(2, 2, &[1.0, 0.3, 0.3, 1.0]).unwrap();
        let spec = ScenarioSpec::with_detector_gram(amps, &g).unwrap();
        let mixed = build_mixed_no_memory(&spec).unwrap();
        assert!(mixed.rho_a.get(0, 1).norm() < 1e-15);
        // block diagonal in the path index
        for a in 0..2 {
            for b in 0..2 {
                assert!(mixed.rho_ad.get(a, 2 + b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn gram_identity_and_all_ones() {
        let states = gram_to_states(&ComplexMatrix::identity(3)).unwrap();
        let g = gram_of(&states);
        assert!(g.max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);

        let ones = ComplexMatrix::from_real(3, 3, &[1.0; 9]).unwrap();
        let states = gram_to_states(&ones).unwrap();
        for s in &states[1..] {
            assert!(inner(&states[0], s).norm() > 1.0 - 1e-12);
            let diff: f64 = s.iter().zip(&states[0]).map(|(a, b)| (a - b).norm()).sum();
            assert!(diff < 1e-12);
        }
    }

    #[test]
    fn gram_rejects_non_psd() {
        let g = ComplexMatrix::from_real(3, 3, &[1.0, 0.9, -0.9, 0.9, 1.0, 0.9, -0.9, 0.9, 1.0])
            .unwrap();
        assert!(matches!(gram_to_states(&g), Err(Error::NotPositive { .. })));
        let g = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.5]).unwrap();
        assert!(gram_to_states(&g).is_err());
    }
}
