use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::interferometer::{check_unit_vectors, ScenarioSpec};
use crate::linalg::{eigh, inv_sqrt_with_null, ComplexMatrix, DensityMatrix, EIGEN_CLIP_TOL};
use crate::random::ginibre;

/// Tolerance on `Σ p_i = 1` and on POVM completeness.
pub const PROB_TOL: f64 = 1e-9;
/// Eigenvalues below this are treated as the null space when inverting.
pub const INV_SQRT_CUTOFF: f64 = 1e-12;

/// Weighted set `{p_i, |φ_i⟩}` of pure states to be told apart.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<Vec<Complex64>>,
}

impl Ensemble {
    pub fn new(probs: Vec<f64>, states: Vec<Vec<Complex64>>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidEnsemble("no members".into()));
        }
        if probs.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidEnsemble("probabilities must be finite and >= 0".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOL {
            return Err(Error::InvalidEnsemble(format!("probabilities sum to {total}")));
        }
        check_unit_vectors(&states, probs.len(), "ensemble state")
            .map_err(|e| Error::InvalidEnsemble(e.to_string()))?;
        Ok(Self { probs, states })
    }

    /// The detector ensemble `{p_i, |φ_i⟩_D}` of a scenario.
    pub fn from_scenario(spec: &ScenarioSpec) -> Self {
        Self {
            probs: spec.probabilities(),
            states: spec.detector_states().to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[Vec<Complex64>] {
        &self.states
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    /// `p_i |φ_i⟩⟨φ_i|`
    pub fn weighted_projector(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::projector(&self.states[i]).scale(self.probs[i])
    }

    pub fn weighted_projectors(&self) -> Vec<ComplexMatrix> {
        (0..self.len()).map(|i| self.weighted_projector(i)).collect()
    }

    /// Average state `ρ = Σ_i p_i |φ_i⟩⟨φ_i|`.
    pub fn average_state(&self) -> DensityMatrix {
        let mut rho = ComplexMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.len() {
            rho.add_assign(&self.weighted_projector(i));
        }
        DensityMatrix::new(rho).expect("average of unit vectors with normalized weights")
    }
}

/// Positive operators summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let d = elements[0].rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for (k, e) in elements.iter().enumerate() {
            if !e.is_square() || e.rows() != d {
                return Err(Error::InvalidPovm(format!("element {k} has the wrong shape")));
            }
            let ev = eigh(e).map_err(|err| Error::InvalidPovm(format!("element {k}: {err}")))?;
            if ev.min() < -EIGEN_CLIP_TOL {
                return Err(Error::InvalidPovm(format!(
                    "element {k} has eigenvalue {:.3e}",
                    ev.min()
                )));
            }
            sum.add_assign(e);
        }
        let err = sum.max_abs_diff(&ComplexMatrix::identity(d));
        if err > PROB_TOL {
            return Err(Error::InvalidPovm(format!(
                "elements sum to identity only within {err:.3e}"
            )));
        }
        Ok(Self {
            elements: elements.iter().map(ComplexMatrix::hermitian_part).collect(),
        })
    }

    pub(crate) fn from_parts_unchecked(elements: Vec<ComplexMatrix>) -> Self {
        Self { elements }
    }

    /// Rescales positive operators `A_k` to `S^{-1/2} A_k S^{-1/2}` with
    /// `S = Σ A_k`; any null space of `S` is added to the first outcome.
    pub fn normalized_from(raw: Vec<ComplexMatrix>) -> Result<Self> {
        if raw.is_empty() {
            return Err(Error::InvalidPovm("no elements".into()));
        }
        let d = raw[0].rows();
        let mut sum = ComplexMatrix::zeros(d, d);
        for a in &raw {
            sum.add_assign(a);
        }
        let (inv, null) = inv_sqrt_with_null(&sum.hermitian_part(), INV_SQRT_CUTOFF)?;
        let mut elements: Vec<ComplexMatrix> = raw
            .iter()
            .map(|a| inv.matmul(a).matmul(&inv).hermitian_part())
            .collect();
        elements[0].add_assign(&null);
        Ok(Self { elements })
    }

    /// Every outcome equally likely regardless of the state: `Π_k = I/m`.
    pub fn trivial(outcomes: usize, dim: usize) -> Self {
        Self {
            elements: vec![ComplexMatrix::identity(dim).scale(1.0 / outcomes as f64); outcomes],
        }
    }

    /// Projective measurement onto an orthonormal basis.
    pub fn projective(basis: &[Vec<Complex64>]) -> Result<Self> {
        Self::new(basis.iter().map(|v| ComplexMatrix::projector(v)).collect())
    }

    /// Random full-rank POVM from Wishart-distributed operators.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, outcomes: usize, dim: usize) -> Self {
        let raw = (0..outcomes)
            .map(|_| {
                let g = ginibre(rng, dim, dim);
                g.matmul(&g.adjoint())
            })
            .collect();
        Self::normalized_from(raw).expect("Wishart operators are Hermitian")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }
}

/// `Σ_i p_i ⟨φ_i|Π_i|φ_i⟩`
pub fn success_probability(e: &Ensemble, m: &Povm) -> Result<f64> {
    if e.len() != m.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} states but {} POVM elements",
            e.len(),
            m.len()
        )));
    }
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
        .zip(m.elements())
        .map(|((p, phi), pi)| p * pi.sandwich(phi, phi).re)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, ONE, ZERO};

    fn basis(n: usize) -> Vec<Vec<Complex64>> {
        (0..n).map(|i| basis_vector(n, i)).collect()
    }

    #[test]
    fn orthonormal_projective_is_perfect() {
        let e = Ensemble::new(vec![0.2, 0.3, 0.5], basis(3)).unwrap();
        let m = Povm::projective(&basis(3)).unwrap();
        assert!((success_probability(&e, &m).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_guess_gives_one_over_n() {
        let e = Ensemble::new(vec![0.25; 4], basis(4)).unwrap();
        let m = Povm::trivial(4, 4);
        assert!((success_probability(&e, &m).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn count_and_dim_mismatch() {
        let e = Ensemble::new(vec![0.5, 0.5], basis(2)).unwrap();
        assert!(success_probability(&e, &Povm::trivial(3, 2)).is_err());
        assert!(success_probability(&e, &Povm::trivial(2, 3)).is_err());
    }

    #[test]
    fn ensemble_validation() {
        assert!(Ensemble::new(vec![0.5, 0.6], basis(2)).is_err());
        assert!(Ensemble::new(vec![1.5, -0.5], basis(2)).is_err());
        assert!(Ensemble::new(vec![1.0], vec![vec![ONE, ONE]]).is_err());
        assert!(Ensemble::new(vec![0.5, 0.5], vec![vec![ONE], vec![ONE, ZERO]]).is_err());
        assert!(Ensemble::new(vec![1.0, 0.0], basis(2)).is_ok());
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![ComplexMatrix::identity(2).scale(0.5)]).is_err());
        assert!(Povm::new(vec![
            ComplexMatrix::from_diag(&[1.5, 1.0]),
            ComplexMatrix::from_diag(&[-0.5, 0.0]),
        ])
        .is_err());
        let mut rng = crate::random::substream(3, &[]);
        let m = Povm::random(&mut rng, 4, 3);
        assert!(Povm::new(m.elements().to_vec()).is_ok());
    }
}
