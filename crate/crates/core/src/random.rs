//! Seeded randomness: per-task substreams and Haar-distributed objects.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::{norm, ComplexMatrix};

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a seed and a path of indices into one 64-bit substream key.
pub fn substream_key(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(seed ^ 0x9e37_79b9_7f4a_7c15), |acc, &x| {
        mix64(acc.wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_add(mix64(x)))
    })
}

/// Independent generator for the task addressed by `path` under `seed`.
pub fn substream(seed: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(substream_key(seed, path))
}

pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-uniform unit vector in `C^dim`.
pub fn haar_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dim).map(|_| complex_normal(rng)).collect();
        let n = norm(&v);
        if n > 1e-12 {
            return v.into_iter().map(|z| z / n).collect();
        }
    }
}

/// Matrix with i.i.d. complex standard normal entries.
pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::new(rows, cols, (0..rows * cols).map(|_| complex_normal(rng)).collect())
        .expect("sizes agree")
}

/// Haar-random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim, dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut v: Vec<Complex64> = (0..dim).map(|i| g[(i, j)]).collect();
        for q in &cols {
            let proj = crate::linalg::inner(q, &v);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= proj * y;
            }
        }
        let n = norm(&v);
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            u[(i, j)] = *z;
        }
    }
    u
}
