//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `h[p][q]` with a
//! diagonal unitary and then applies a real Givens rotation, so the
//! accumulated eigenvector matrix stays unitary to rounding.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use super::HERMITIAN_TOL;
use crate::error::{Error, Result};

/// Sweeps stop once the off-diagonal Frobenius mass drops below this
/// (relative to the matrix scale when that exceeds one).
pub const OFF_DIAGONAL_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;

/// Eigen-decomposition `H = V diag(values) V†` with ascending values.
#[derive(Debug, Clone)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl Eigh {
    /// Column `k` of `V`, the eigenvector for `values[k]`.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let n = self.vectors.rows();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `V f(Λ) V†`
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let weights: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)] * w;
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

pub fn eigh(h: &ComplexMatrix) -> Result<Eigh> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigh needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(jacobi(h.hermitian_part()))
}

fn off_diagonal_mass(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi(mut a: ComplexMatrix) -> Eigh {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_mass(&a) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    Eigh { values, vectors }
}

/// Annihilates `a[p][q]` via `a ← G† a G`, `v ← v G` with
/// `G = diag(1, e^{-iα}) · [[c, s], [-s, c]]` on the (p, q) plane.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag < f64::MIN_POSITIVE {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag;

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -phase.conj() * s;
    let g_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// `H^{1/2}` of a PSD matrix; negative rounding noise is clipped to zero.
pub fn sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(eigh(h)?.apply(|x| x.max(0.0).sqrt()))
}

/// Pseudo-inverse square root on the eigenspaces above `cutoff`, plus the
/// projector onto the remaining (null) space.
pub fn inv_sqrt_with_null(h: &ComplexMatrix, cutoff: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let e = eigh(h)?;
    let inv = e.apply(|x| if x > cutoff { 1.0 / x.sqrt() } else { 0.0 });
    let null = e.apply(|x| if x > cutoff { 0.0 } else { 1.0 });
    Ok((inv, null))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_input_sorted() {
        let e = eigh(&ComplexMatrix::from_diag(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = eigh(&x).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = ComplexMatrix::new(
            2,
            2,
            vec![ZERO, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), ZERO],
        )
        .unwrap();
        let e = eigh(&y).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
        let recon = e.apply(|x| x);
        assert!(recon.max_abs_diff(&y) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
        let r = ComplexMatrix::zeros(2, 3);
        assert!(matches!(eigh(&r), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn degenerate_and_zero_matrices() {
        let e = eigh(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        let e = eigh(&ComplexMatrix::identity(4)).unwrap();
        assert!(e.vectors.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }
}
