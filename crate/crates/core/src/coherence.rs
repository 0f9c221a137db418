//! Coherence in the path basis and the entropic quantities around it.

use crate::error::{Error, Result};
use crate::interferometer::{analyze, ScenarioSpec};
use crate::linalg::{
    partial_trace, purity, shannon_entropy, von_neumann_entropy, DensityMatrix, DimsLabel,
};

/// `C_l1(ρ) = Σ_{i≠j} |ρ_ij|`
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += rho.get(i, j).norm();
            }
        }
    }
    s
}

/// `X = C_l1(ρ) / N`, in `[0, 1 - 1/N]`.
pub fn normalized_x(rho: &DensityMatrix, n: usize) -> Result<f64> {
    if rho.dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "state has dimension {}, path count is {n}",
            rho.dim()
        )));
    }
    Ok(l1_coherence(rho) / n as f64)
}

/// `C_r(ρ) = S(ρ_diag) - S(ρ)` in bits.
pub fn rel_ent_coherence(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.diagonal()) - von_neumann_entropy(rho)
}

/// `S(B|A) = S(ρ_AB) - S(ρ_A)`, where `A` is the first of the two labels.
pub fn conditional_entropy(rho_ab: &DensityMatrix, dims: &DimsLabel) -> Result<f64> {
    if dims.len() != 2 {
        return Err(Error::InvalidDims(format!(
            "conditional entropy needs exactly two subsystems, got {}",
            dims.len()
        )));
    }
    let first = dims.names().next().expect("two subsystems").to_string();
    let rho_a = partial_trace(rho_ab, dims, &[first.as_str()])?;
    Ok(von_neumann_entropy(rho_ab) - von_neumann_entropy(&rho_a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceSummary {
    pub c_l1: f64,
    pub x_normalized: f64,
    /// bits
    pub c_rel_ent: f64,
    /// `H({ρ_ii})` in bits
    pub shannon_p: f64,
    /// `S(ρ)` in bits
    pub s_rho: f64,
}

impl CoherenceSummary {
    pub fn of(rho: &DensityMatrix) -> Self {
        let c_l1 = l1_coherence(rho);
        let shannon_p = shannon_entropy(&rho.diagonal());
        let s_rho = von_neumann_entropy(rho);
        Self {
            c_l1,
            x_normalized: c_l1 / rho.dim() as f64,
            c_rel_ent: shannon_p - s_rho,
            shannon_p,
            s_rho,
        }
    }
}

/// Coherence lost to the memory, compared against the memoryless particle
/// `Σ_i √p_i |i⟩` seen through the same detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceLoss {
    /// `X̃_A² - X_A²`
    pub delta_x_sq: f64,
    /// `(Tr ρ_AB² - Tr ρ_A²) / N²`
    pub lower: f64,
    /// `2(N-1)²/N · (Tr ρ_AB² - Tr ρ_A²)`
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub const LOSS_TOL: f64 = 1e-9;

pub fn coherence_loss_bounds(spec: &ScenarioSpec) -> Result<CoherenceLoss> {
    let n = spec.n();
    let nf = n as f64;
    let (_, with_memory) = analyze(spec)?;
    let (_, without) = analyze(&spec.without_memory())?;
    let x = normalized_x(&with_memory.rho_a, n)?;
    let x_tilde = normalized_x(&without.rho_a, n)?;
    let entanglement = purity(&with_memory.rho_ab) - purity(&with_memory.rho_a);
    let delta_x_sq = x_tilde * x_tilde - x * x;
    let lower = entanglement / (nf * nf);
    let upper = 2.0 * (nf - 1.0).powi(2) / nf * entanglement;
    Ok(CoherenceLoss {
        delta_x_sq,
        lower,
        upper,
        lower_holds: lower - LOSS_TOL <= delta_x_sq,
        upper_holds: delta_x_sq <= upper + LOSS_TOL,
    })
}
