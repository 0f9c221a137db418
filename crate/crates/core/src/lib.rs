//! Numerical laboratory for wave-particle duality in N-path interferometers
//! whose particle is entangled with a quantum memory.
//!
//! The crate builds the particle-memory-detector state, derives every
//! reduced density matrix, quantifies path coherence and which-path
//! information, and evaluates both sides of the coherence/path-information
//! duality relations so they can be checked over analytic and randomized
//! scenarios.

pub mod coherence;
pub mod discrimination;
pub mod duality;
pub mod error;
pub mod harness;
pub mod interferometer;
pub mod linalg;
pub mod random;

pub use error::{Error, Result};
