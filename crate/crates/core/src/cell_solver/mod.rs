//! Periodic-strip Laplace cell problems, cohomology bases, decay of the
//! potentials towards their limits, and the Hardy inequality check.

mod basis;
mod checks;
mod decay;
mod grid;
mod hardy;
mod potentials;

pub use basis::{basis_kinds, compute_basis, element, BasisElement, CohomologyBasis, ElementChecks, Space};
pub use checks::{achieved_limits, boundary_residual, curl_residual, divergence_residual, jump_residual, plane_deviation};
pub use decay::{decay_report, DecayReport, DEVIATION_FLOOR};
pub use grid::{LinearSolver, StripGrid, CELL_TOLERANCE};
pub use hardy::{hardy_check, hardy_ratio, random_bump_profiles, shifted_exponential_profile, HardyProfile};
pub use potentials::{
    solve_p3, solve_p_tangential, solve_potential, solve_q3, solve_q_cut, solve_q_tangential, AffinePart, Layout,
    PotentialKind, ScalarPotential, Side, Sign, StaggeredField,
};
