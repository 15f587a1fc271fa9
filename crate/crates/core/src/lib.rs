//! Numerical laboratory for electromagnetic shielding by thin periodic
//! layers of perfect conductors.
//!
//! The crate covers the whole chain: exact voxelization of the canonical
//! obstacles and their topology, the periodic cell potentials and the
//! cohomology bases built from them, a staggered-grid frequency-domain
//! Maxwell solver for the resolved layer, the homogenized interface
//! problem, and the delta sweeps comparing the two.

pub mod cell_solver;
pub mod error;
pub mod experiments;
pub mod fdfd;
pub mod geometry;
pub mod homogenized;
pub mod io;
pub mod lattice;
pub mod linalg;

pub use cell_solver::{compute_basis, decay_report, solve_potential, CohomologyBasis, DecayReport, PotentialKind, ScalarPotential, Space, StripGrid};
pub use error::{Error, Result};
pub use experiments::{delta_sweep, SweepRow, SweepTable};
pub use fdfd::{measure_transmission, solve_scattering, EMField, Polarization, SimulationConfig, SourceKind, SourceSpec, TransmissionReport};
pub use geometry::{build_canonical_obstacle, topology_certificate, voxelize_layer, CanonicalObstacle, CaseId, CutSet, LayerGeometry, Rational, TopologyCertificate};
pub use homogenized::{analytic_rt, interface_conditions, solve_limit_problem, InterfaceConditionSet, RTCoefficients};
pub use io::{parse_config, serialize_config, write_outputs, RunManifest};
