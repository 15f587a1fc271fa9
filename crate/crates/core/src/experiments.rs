//! Delta sweeps comparing resolved layers with the homogenized limit.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fdfd::{measure_transmission, solve_scattering, EMField, Polarization, SimulationConfig, TransmissionReport};
use crate::geometry::{CaseId, Rational};
use crate::homogenized::{interface_conditions, solve_limit_problem};

/// Default cap on the number of edge unknowns of a single solve.
pub const DEFAULT_BUDGET: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub case: CaseId,
    pub delta: Rational,
    pub polarization: Polarization,
    pub shielding_ratio: f64,
    /// Relative L2 distance between resolved and limit field on `|x3| >= 2 delta`.
    pub far_field_error: f64,
    /// Graph norm of the resolved field per unit area over `|f|`.
    pub stability_ratio: f64,
    pub resolved: TransmissionReport,
    pub limit: TransmissionReport,
    pub unknowns: usize,
    pub iterations: usize,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn row(&self, delta: Rational, pol: Polarization) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.delta == delta && r.polarization == pol)
    }
}

/// Configuration of one sweep row: same grid density per period as `base`.
pub fn row_config(base: &SimulationConfig, case: CaseId, delta: Rational, pol: Polarization) -> SimulationConfig {
    let per_period = base.delta / base.spacing;
    let mut c = base.clone();
    c.case = Some(case);
    c.delta = delta;
    c.spacing = delta / per_period;
    c.source.polarization = pol;
    c
}

/// Edge unknowns of the lattice of a configuration.
pub fn projected_unknowns(config: &SimulationConfig) -> Result<usize> {
    Ok(config.lattice()?.n_edges())
}

/// Relative L2 difference of two fields over edges with `|x3| >= cutoff`.
pub fn far_field_error(resolved: &EMField, limit: &EMField, cutoff: f64) -> f64 {
    let lat = &resolved.lattice;
    let mut num = 0.0;
    let mut den = 0.0;
    for e in 0..lat.n_edges() {
        let (axis, _, _, k) = lat.edge_coords(e);
        let mut z = k as f64 - lat.mid_layer() as f64;
        if axis == 2 {
            z += 0.5;
        }
        if (z * resolved.h).abs() + 1e-12 < cutoff {
            continue;
        }
        num += (resolved.e[e] - limit.e[e]).norm_sqr();
        den += limit.e[e].norm_sqr();
    }
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        num.sqrt()
    }
}

pub fn sweep_row(base: &SimulationConfig, case: CaseId, delta: Rational, pol: Polarization, budget: usize) -> Result<SweepRow> {
    let config = row_config(base, case, delta, pol);
    config.validate()?;
    let unknowns = projected_unknowns(&config)?;
    if unknowns > budget {
        return Err(Error::AbortOnBudget { unknowns, cap: budget });
    }
    let layer = config.layer()?;
    let resolved = solve_scattering(&config, layer.as_ref())?;
    let limit = solve_limit_problem(&config, &interface_conditions(case))?;
    let resolved_report = measure_transmission(&resolved, &config, config.d)?;
    let limit_report = measure_transmission(&limit, &config, config.d)?;
    let cutoff = 2.0 * crate::geometry::to_f64(delta);
    Ok(SweepRow {
        case,
        delta,
        polarization: pol,
        shielding_ratio: resolved_report.shielding_ratio,
        far_field_error: far_field_error(&resolved, &limit, cutoff),
        stability_ratio: resolved.graph_norm() / config.source.amplitude.norm(),
        resolved: resolved_report,
        limit: limit_report,
        unknowns: resolved.blocked.iter().filter(|&&b| !b).count(),
        iterations: resolved.stats.iterations,
    })
}

/// Runs every `(delta, polarization)` row on the current rayon pool. Rows
/// come back ordered by decreasing delta, then by polarization order.
pub fn delta_sweep(case: CaseId, deltas: &[Rational], pols: &[Polarization], base: &SimulationConfig, budget: usize) -> Result<SweepTable> {
    if deltas.is_empty() || pols.is_empty() {
        return Err(Error::schema("deltas", "sweep needs at least one delta and one polarization"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::schema("deltas", "must be strictly decreasing"));
    }
    let jobs: Vec<(Rational, Polarization)> = deltas.iter().flat_map(|&d| pols.iter().map(move |&p| (d, p))).collect();
    for &(d, p) in &jobs {
        let c = row_config(base, case, d, p);
        c.validate()?;
        let unknowns = projected_unknowns(&c)?;
        if unknowns > budget {
            return Err(Error::AbortOnBudget { unknowns, cap: budget });
        }
    }
    let rows = jobs
        .par_iter()
        .map(|&(d, p)| sweep_row(base, case, d, p, budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}
