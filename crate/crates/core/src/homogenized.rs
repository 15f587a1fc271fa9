//! Effective interface conditions replacing the layer in the limit
//! `delta -> 0`, their closed-form plane-wave coefficients, and the limit
//! problem solved on the staggered lattice.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fdfd::{solve_constrained, Backend, EMField, Polarization, SimulationConfig};
use crate::geometry::CaseId;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterfaceConditionSet {
    pub case: CaseId,
    /// Lateral directions (1, 2) whose tangential field vanishes on the
    /// interface.
    pub tangential_e_zero: Vec<usize>,
    /// Lateral directions in which the tangential field and the tangential
    /// part of `curl E x e3` are continuous across the interface.
    pub continuity: Vec<usize>,
}

impl InterfaceConditionSet {
    pub fn is_transparent(&self) -> bool {
        self.tangential_e_zero.is_empty()
    }
}

pub fn interface_conditions(case: CaseId) -> InterfaceConditionSet {
    let (zero, cont) = match case {
        CaseId::DiscreteObstacle => (vec![], vec![1, 2]),
        CaseId::ParallelWires => (vec![1], vec![2]),
        CaseId::WireMesh => (vec![1, 2], vec![]),
    };
    InterfaceConditionSet {
        case,
        tangential_e_zero: zero,
        continuity: cont,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RTCoefficients {
    pub reflection: Complex64,
    pub transmission: Complex64,
    pub polarization: Polarization,
    pub case: CaseId,
}

/// Normal-incidence reflection and transmission of the effective interface.
/// A constrained polarization meets a conducting sheet, a free one a
/// transparent plane; `omega` and `eps` only enter through the validity
/// check.
pub fn analytic_rt(case: CaseId, polarization: Polarization, omega: f64, epsilon: Complex64) -> Result<RTCoefficients> {
    if !(epsilon.re > 0.0 && epsilon.im > 0.0) {
        return Err(Error::InvalidEpsilon {
            re: epsilon.re,
            im: epsilon.im,
        });
    }
    if omega.is_nan() || omega <= 0.0 {
        return Err(Error::schema("omega", "must be positive"));
    }
    let conditions = interface_conditions(case);
    // share of the polarization along the constrained directions
    let blocked: f64 = conditions.tangential_e_zero.iter().map(|&d| polarization.0[d - 1].powi(2)).sum();
    let free = 1.0 - blocked;
    Ok(RTCoefficients {
        reflection: Complex64::new(-blocked, 0.0),
        transmission: Complex64::new(free, 0.0),
        polarization,
        case,
    })
}

/// Edges of the interface plane `x3 = 0` constrained by the conditions.
pub fn interface_mask(config: &SimulationConfig, conditions: &InterfaceConditionSet) -> Result<Vec<bool>> {
    let lat = config.lattice()?;
    let k = lat.mid_layer();
    let mut mask = vec![false; lat.n_edges()];
    for &dir in &conditions.tangential_e_zero {
        for j in 0..lat.ny {
            for i in 0..lat.nx {
                mask[lat.edge(dir - 1, i, j, k)] = true;
            }
        }
    }
    Ok(mask)
}

/// Limit problem: no layer, the conditions imposed on the edges of the
/// plane `x3 = 0`.
pub fn solve_limit_problem(config: &SimulationConfig, conditions: &InterfaceConditionSet) -> Result<EMField> {
    solve_limit_problem_with(config, conditions, Backend::Krylov)
}

pub fn solve_limit_problem_with(config: &SimulationConfig, conditions: &InterfaceConditionSet, backend: Backend) -> Result<EMField> {
    let mask = interface_mask(config, conditions)?;
    solve_constrained(config, &mask, backend)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_table() {
        let eps = Complex64::new(1.0, 1.0);
        let rt = |c, p| {
            let r = analytic_rt(c, p, 6.0, eps).unwrap();
            (r.reflection.re, r.transmission.re)
        };
        assert_eq!(rt(CaseId::WireMesh, Polarization::E1), (-1.0, 0.0));
        assert_eq!(rt(CaseId::WireMesh, Polarization::E2), (-1.0, 0.0));
        assert_eq!(rt(CaseId::DiscreteObstacle, Polarization::E2), (0.0, 1.0));
        assert_eq!(rt(CaseId::ParallelWires, Polarization::E1), (-1.0, 0.0));
        assert_eq!(rt(CaseId::ParallelWires, Polarization::E2), (0.0, 1.0));
        assert!(matches!(
            analytic_rt(CaseId::WireMesh, Polarization::E1, 6.0, Complex64::new(1.0, 0.0)),
            Err(Error::InvalidEpsilon { .. })
        ));
    }

    #[test]
    fn condition_sets() {
        assert!(interface_conditions(CaseId::DiscreteObstacle).is_transparent());
        assert_eq!(interface_conditions(CaseId::ParallelWires).tangential_e_zero, vec![1]);
        assert_eq!(interface_conditions(CaseId::ParallelWires).continuity, vec![2]);
        assert_eq!(interface_conditions(CaseId::WireMesh).tangential_e_zero, vec![1, 2]);
    }
}
