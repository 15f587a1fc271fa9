//! Fixtures shared by the benchmarks.

use cage_core::fdfd::SimulationConfig;
use cage_core::{build_canonical_obstacle, CaseId, Rational, StripGrid};

/// Strip grid for the canonical obstacle of `case`.
pub fn strip(case: CaseId, n: usize, half_height: usize) -> StripGrid {
    StripGrid::new(Some(&build_canonical_obstacle(case)), n, half_height).expect("valid strip")
}

/// Layer problem on a short domain so one solve stays in the millisecond range.
pub fn short_config(case: CaseId, delta: Rational) -> SimulationConfig {
    let mut c = SimulationConfig::new(Some(case), delta);
    c.x3 = Rational::new(3, 1);
    c
}
