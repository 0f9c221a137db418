//! Dense complex linear algebra for small Hilbert spaces.

mod eigen;
mod matrix;
mod state;

pub use eigen::{eigh, inv_sqrt_with_null, sqrt_psd, Eigh, MAX_SWEEPS, OFF_DIAGONAL_TOL};
pub use matrix::{basis_vector, inner, kron, kron_vec, norm, ComplexMatrix, ONE, ZERO};
pub use state::{
    partial_trace, partial_trace_matrix, purity, reduce_pure, shannon_entropy, trace_norm,
    von_neumann_entropy, DensityMatrix, DimsLabel,
};

pub use num_complex::Complex64;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const NORM_TOL: f64 = 1e-9;
/// Eigenvalues in `[-EIGEN_CLIP_TOL, 0)` count as rounding noise.
pub const EIGEN_CLIP_TOL: f64 = 1e-9;
