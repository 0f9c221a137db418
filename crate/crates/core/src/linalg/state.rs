//! Density matrices, subsystem labels and the scalar functionals on them.

use num_complex::Complex64;

use super::eigen::eigh;
use super::matrix::{ComplexMatrix, ZERO};
use super::{EIGEN_CLIP_TOL, HERMITIAN_TOL, TRACE_TOL};
use crate::error::{Error, Result};

/// Ordered, named subsystem dimensions of a composite Hilbert space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimsLabel {
    parts: Vec<(String, usize)>,
}

impl DimsLabel {
    pub fn new<S: Into<String>>(parts: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let parts: Vec<(String, usize)> = parts.into_iter().map(|(n, d)| (n.into(), d)).collect();
        if parts.is_empty() {
            return Err(Error::InvalidDims("no subsystems".into()));
        }
        for (i, (name, d)) in parts.iter().enumerate() {
            if *d == 0 {
                return Err(Error::InvalidDims(format!("subsystem `{name}` has dimension 0")));
            }
            if parts[..i].iter().any(|(n, _)| n == name) {
                return Err(Error::InvalidDims(format!("duplicate subsystem `{name}`")));
            }
        }
        let label = Self { parts };
        label.checked_total()?;
        Ok(label)
    }

    fn checked_total(&self) -> Result<usize> {
        self.parts.iter().try_fold(1usize, |acc, (_, d)| {
            acc.checked_mul(*d)
                .ok_or_else(|| Error::DimensionOverflow("subsystem dimension product".into()))
        })
    }

    pub fn total(&self) -> usize {
        self.parts.iter().map(|(_, d)| d).product()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.parts.iter().map(|(n, _)| n.as_str())
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|(_, d)| *d).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.parts.iter().position(|(n, _)| n == name)
    }

    pub fn dim_of(&self, name: &str) -> Option<usize> {
        self.position(name).map(|i| self.parts[i].1)
    }

    /// Labels of the kept subsystems, in original order.
    pub fn restrict(&self, keep: &[&str]) -> Result<DimsLabel> {
        let mask = self.keep_mask(keep)?;
        DimsLabel::new(
            self.parts
                .iter()
                .zip(&mask)
                .filter(|(_, &k)| k)
                .map(|((n, d), _)| (n.clone(), *d)),
        )
    }

    fn keep_mask(&self, keep: &[&str]) -> Result<Vec<bool>> {
        if keep.is_empty() {
            return Err(Error::InvalidDims("keep set is empty".into()));
        }
        let mut mask = vec![false; self.parts.len()];
        for name in keep {
            let i = self
                .position(name)
                .ok_or_else(|| Error::UnknownSubsystem(name.to_string()))?;
            mask[i] = true;
        }
        Ok(mask)
    }
}

/// Splits a flat index into (kept, traced) flat indices.
struct IndexSplit {
    dims: Vec<usize>,
    mask: Vec<bool>,
}

impl IndexSplit {
    fn split(&self, mut flat: usize) -> (usize, usize) {
        let (mut k, mut t) = (0, 0);
        let (mut ks, mut ts) = (1, 1);
        for (d, keep) in self.dims.iter().zip(&self.mask).rev() {
            let digit = flat % d;
            flat /= d;
            if *keep {
                k += digit * ks;
                ks *= d;
            } else {
                t += digit * ts;
                ts *= d;
            }
        }
        (k, t)
    }
}

/// Partial trace over every subsystem not listed in `keep`. Works on any
/// square operator; the kept subsystems stay in their original order.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dims: &DimsLabel,
    keep: &[&str],
) -> Result<ComplexMatrix> {
    if !m.is_square() || m.rows() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{} but labels {:?} multiply to {}",
            m.rows(),
            m.cols(),
            dims.dims(),
            dims.total()
        )));
    }
    let mask = dims.keep_mask(keep)?;
    let split = IndexSplit { dims: dims.dims(), mask };
    let kept: usize = dims
        .dims()
        .iter()
        .zip(&split.mask)
        .filter(|(_, &k)| k)
        .map(|(d, _)| d)
        .product();
    let n = m.rows();
    let parts: Vec<(usize, usize)> = (0..n).map(|i| split.split(i)).collect();
    let mut out = ComplexMatrix::zeros(kept, kept);
    for i in 0..n {
        let (ki, ti) = parts[i];
        for j in 0..n {
            let (kj, tj) = parts[j];
            if ti == tj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

/// Reduced operator `Tr_traced |ψ⟩⟨ψ|` computed straight from the amplitudes.
pub fn reduce_pure(psi: &[Complex64], dims: &DimsLabel, keep: &[&str]) -> Result<ComplexMatrix> {
    if psi.len() != dims.total() {
        return Err(Error::DimensionMismatch(format!(
            "state has {} amplitudes but labels multiply to {}",
            psi.len(),
            dims.total()
        )));
    }
    let mask = dims.keep_mask(keep)?;
    let split = IndexSplit { dims: dims.dims(), mask };
    let kept: usize = dims
        .dims()
        .iter()
        .zip(&split.mask)
        .filter(|(_, &k)| k)
        .map(|(d, _)| d)
        .product();
    let traced = psi.len() / kept;
    // amplitude table psi[k][t]
    let mut table = vec![ZERO; psi.len()];
    for (i, a) in psi.iter().enumerate() {
        let (k, t) = split.split(i);
        table[k * traced + t] = *a;
    }
    let mut out = ComplexMatrix::zeros(kept, kept);
    for a in 0..kept {
        for b in a..kept {
            let ra = &table[a * traced..(a + 1) * traced];
            let rb = &table[b * traced..(b + 1) * traced];
            let z: Complex64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
            out[(a, b)] = z;
            out[(b, a)] = z.conj();
        }
        out[(a, a)].im = 0.0;
    }
    Ok(out)
}

/// A validated density operator: Hermitian, unit trace, PSD.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::TraceNotUnit { trace });
        }
        let min_eigenvalue = eigh(&matrix)?.min();
        if min_eigenvalue < -EIGEN_CLIP_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self {
            matrix: matrix.hermitian_part(),
        })
    }

    /// `|ψ⟩⟨ψ|` for a unit vector.
    pub fn from_pure(psi: &[Complex64]) -> Result<Self> {
        let n = super::matrix::norm(psi);
        if (n - 1.0).abs() > super::NORM_TOL {
            return Err(Error::NotNormalized {
                what: "pure state".into(),
                norm: n,
            });
        }
        Self::new(ComplexMatrix::projector(psi))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Diagonal in the computational basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// Eigenvalues in ascending order with rounding noise in
    /// `[-EIGEN_CLIP_TOL, 0)` clipped to zero.
    pub fn spectrum(&self) -> Vec<f64> {
        eigh(&self.matrix)
            .expect("validated density matrix is Hermitian")
            .values
            .into_iter()
            .map(|x| x.clamp(0.0, 1.0))
            .collect()
    }
}

pub fn partial_trace(rho: &DensityMatrix, dims: &DimsLabel, keep: &[&str]) -> Result<DensityMatrix> {
    let reduced = partial_trace_matrix(rho.matrix(), dims, keep)?;
    Ok(DensityMatrix {
        matrix: reduced.hermitian_part(),
    })
}

/// `Tr ρ²` via `Σ_ij ρ_ij ρ_ji`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (m[(i, j)] * m[(j, i)]).re;
        }
    }
    s
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(&rho.spectrum())
}

/// Shannon entropy in bits with `0 log 0 = 0`.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Sum of absolute eigenvalues of a Hermitian operator.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(eigh(m)?.values.iter().map(|x| x.abs()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::{kron, ONE};

    fn bell() -> Vec<Complex64> {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        vec![Complex64::new(h, 0.0), ZERO, ZERO, Complex64::new(h, 0.0)]
    }

    fn ab(da: usize, db: usize) -> DimsLabel {
        DimsLabel::new([("A", da), ("B", db)]).unwrap()
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        let rho = DensityMatrix::from_pure(&bell()).unwrap();
        let ra = partial_trace(&rho, &ab(2, 2), &["A"]).unwrap();
        assert!(ra.matrix().max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
        let via_vector = reduce_pure(&bell(), &ab(2, 2), &["B"]).unwrap();
        assert!(via_vector.max_abs_diff(DensityMatrix::maximally_mixed(2).matrix()) < 1e-15);
    }

    #[test]
    fn product_state_factorizes() {
        let ra = ComplexMatrix::from_diag(&[0.25, 0.75]);
        let rb = ComplexMatrix::from_diag(&[0.5, 0.3, 0.2]);
        let rho = DensityMatrix::new(kron(&ra, &rb).unwrap()).unwrap();
        let got = partial_trace(&rho, &ab(2, 3), &["A"]).unwrap();
        assert!(got.matrix().max_abs_diff(&ra) < 1e-15);
        let got = partial_trace(&rho, &ab(2, 3), &["B"]).unwrap();
        assert!(got.matrix().max_abs_diff(&rb) < 1e-15);
    }

    #[test]
    fn partial_trace_errors() {
        let rho = DensityMatrix::from_pure(&bell()).unwrap();
        assert!(matches!(
            partial_trace(&rho, &ab(2, 3), &["A"]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &ab(2, 2), &["C"]),
            Err(Error::UnknownSubsystem(_))
        ));
        assert!(matches!(
            partial_trace(&rho, &ab(2, 2), &[]),
            Err(Error::InvalidDims(_))
        ));
    }

    #[test]
    fn dims_label_validation() {
        assert!(DimsLabel::new([("A", 2), ("A", 2)]).is_err());
        assert!(DimsLabel::new([("A", 0)]).is_err());
        assert!(DimsLabel::new(Vec::<(String, usize)>::new()).is_err());
        let d = DimsLabel::new([("A", 2), ("B", 3), ("D", 4)]).unwrap();
        assert_eq!(d.total(), 24);
        assert_eq!(d.restrict(&["D", "A"]).unwrap().dims(), vec![2, 4]);
    }

    #[test]
    fn density_validation() {
        let not_unit = ComplexMatrix::from_diag(&[0.5, 0.4]);
        assert!(matches!(DensityMatrix::new(not_unit), Err(Error::TraceNotUnit { .. })));
        let negative = ComplexMatrix::from_diag(&[1.1, -0.1]);
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NotPositive { .. })));
        let tiny_negative = ComplexMatrix::from_diag(&[1.0 + 5e-10, -5e-10]);
        assert!(DensityMatrix::new(tiny_negative).is_ok());
        assert!(DensityMatrix::from_pure(&[ONE, ONE]).is_err());
    }

    #[test]
    fn purity_examples() {
        assert!((purity(&DensityMatrix::from_pure(&bell()).unwrap()) - 1.0).abs() < 1e-15);
        assert!((purity(&DensityMatrix::maximally_mixed(5)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&DensityMatrix::from_pure(&bell()).unwrap()).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(2)) - 1.0).abs() < 1e-15);
        let rho = DensityMatrix::new(ComplexMatrix::from_diag(&[0.75, 0.25])).unwrap();
        // -(3/4)log2(3/4) - (1/4)log2(1/4)
        let expected = 2.0 - 0.75 * 3f64.log2();
        assert!((von_neumann_entropy(&rho) - expected).abs() < 1e-15);
        assert!((expected - 0.811278).abs() < 1e-6);
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&ComplexMatrix::from_diag(&[1.0, -1.0])).unwrap(), 2.0);
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
        let bad = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 2.0, 0.0]).unwrap();
        assert!(trace_norm(&bad).is_err());
    }
}
