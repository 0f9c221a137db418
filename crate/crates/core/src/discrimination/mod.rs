//! Path information: minimum-error discrimination of the detector states
//! and the information-theoretic quantities built on it.

mod barrier;
mod ensemble;
mod info;
mod min_error;

pub use ensemble::{success_probability, Ensemble, Povm, INV_SQRT_CUTOFF, PROB_TOL};
pub use info::{
    accessible_info_lower, accessible_info_search, holevo, joint_distribution,
    mutual_information, AccessibleEstimate, AccessibleSource,
};
pub use min_error::{
    certificate_gap, helstrom, min_error_solve, pairwise_bound, pretty_good_measurement,
    DiscriminationResult, SolverOptions, CERTIFICATE_TOL,
};
