//! Brute-force index-summation oracles, written without the library's
//! linear algebra, plus random instance generators.
#![allow(dead_code)]

use num_complex::Complex64;
use pathduality::discrimination::{Ensemble, Povm};
use pathduality::linalg::{ComplexMatrix, DensityMatrix};
use pathduality::random::{ginibre, haar_vector};
use rand::Rng;

pub type Dense = Vec<Vec<Complex64>>;

pub fn dense(m: &ComplexMatrix) -> Dense {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect()).collect()
}

/// `(a ⊗ b)[(i·br + k), (j·bc + l)] = a[i][j] · b[k][l]`
pub fn kron_oracle(a: &Dense, b: &Dense) -> Dense {
    let (ar, ac) = (a.len(), a[0].len());
    let (br, bc) = (b.len(), b[0].len());
    let mut out = vec![vec![Complex64::default(); ac * bc]; ar * br];
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Reduced state of a bipartite `da × db` operator: `keep_first` gives
/// `Σ_k ρ[(i,k),(j,k)]`, otherwise `Σ_i ρ[(i,k),(i,l)]`.
pub fn partial_trace_oracle(rho: &Dense, da: usize, db: usize, keep_first: bool) -> Dense {
    if keep_first {
        let mut out = vec![vec![Complex64::default(); da]; da];
        for i in 0..da {
            for j in 0..da {
                for k in 0..db {
                    out[i][j] += rho[i * db + k][j * db + k];
                }
            }
        }
        out
    } else {
        let mut out = vec![vec![Complex64::default(); db]; db];
        for k in 0..db {
            for l in 0..db {
                for i in 0..da {
                    out[k][l] += rho[i * db + k][i * db + l];
                }
            }
        }
        out
    }
}

pub fn l1_oracle(rho: &Dense) -> f64 {
    let mut s = 0.0;
    for (i, row) in rho.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if i != j {
                s += (z.re * z.re + z.im * z.im).sqrt();
            }
        }
    }
    s
}

/// `Σ_i p_i Σ_ab conj(φ_i[a]) Π_i[a][b] φ_i[b]`
pub fn success_oracle(probs: &[f64], states: &[Vec<Complex64>], povm: &[Dense]) -> f64 {
    let mut total = 0.0;
    for ((p, phi), pi) in probs.iter().zip(states).zip(povm) {
        let mut s = Complex64::default();
        for a in 0..phi.len() {
            for b in 0..phi.len() {
                s += phi[a].conj() * pi[a][b] * phi[b];
            }
        }
        total += p * s.re;
    }
    total
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Wishart-normalized random density matrix of rank `rank`.
pub fn random_density<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> DensityMatrix {
    let g = ginibre(rng, dim, rank);
    let w = g.matmul(&g.adjoint());
    let t = w.trace().re;
    DensityMatrix::new(w.scale(1.0 / t)).unwrap()
}

pub fn random_probs<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| -rng.gen_range(1e-12f64..1.0).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

pub fn random_ensemble<R: Rng>(rng: &mut R, n: usize, dim: usize) -> Ensemble {
    let probs = random_probs(rng, n);
    let states = (0..n).map(|_| haar_vector(rng, dim)).collect();
    Ensemble::new(probs, states).unwrap()
}

pub fn random_povm<R: Rng>(rng: &mut R, outcomes: usize, dim: usize) -> Povm {
    Povm::random(rng, outcomes, dim)
}
