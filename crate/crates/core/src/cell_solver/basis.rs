use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{CaseId, TopologyCertificate};

use super::checks::{achieved_limits, boundary_residual, curl_residual, divergence_residual};
use super::grid::StripGrid;
use super::potentials::{solve_potential, PotentialKind, ScalarPotential};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// Zero tangential trace on the obstacle.
    Normal,
    /// Zero normal trace on the obstacle.
    Tangential,
}

impl Space {
    pub fn name(self) -> &'static str {
        match self {
            Space::Normal => "KN",
            Space::Tangential => "KT",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Space {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "KN" | "kn" | "N" => Ok(Space::Normal),
            "KT" | "kt" | "T" => Ok(Space::Tangential),
            _ => Err(Error::schema("space", format!("expected KN or KT, got `{s}`"))),
        }
    }
}

/// Residuals of the discrete identities, relative to the largest entry.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementChecks {
    pub curl: f64,
    pub divergence: f64,
    pub boundary: f64,
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub potential: ScalarPotential,
    pub limit_plus: [f64; 3],
    pub limit_minus: [f64; 3],
    pub checks: ElementChecks,
}

impl BasisElement {
    pub fn kind(&self) -> PotentialKind {
        self.potential.kind
    }

    fn limit_vector(&self) -> [f64; 6] {
        let (p, m) = (self.limit_plus, self.limit_minus);
        [p[0], p[1], p[2], m[0], m[1], m[2]]
    }
}

#[derive(Clone, Debug)]
pub struct CohomologyBasis {
    pub space: Space,
    pub case: CaseId,
    pub certificate: TopologyCertificate,
    pub elements: Vec<BasisElement>,
    pub dimension: usize,
    /// Gram matrix of the 6-vectors `(limit+, limit-)`.
    pub gram: DMatrix<f64>,
    pub gram_condition: f64,
    pub gram_rank: usize,
}

/// Generators of the space for the given topology, in reporting order.
pub fn basis_kinds(space: Space, cert: &TopologyCertificate) -> Vec<PotentialKind> {
    let mut out = Vec::new();
    match space {
        Space::Normal => {
            if cert.constructible(1) {
                out.push(PotentialKind::P1);
            }
            if cert.constructible(2) {
                out.push(PotentialKind::P2);
            }
            out.extend([PotentialKind::P3Plus, PotentialKind::P3Minus]);
        }
        Space::Tangential => {
            if cert.needs_cut(1) {
                out.extend([PotentialKind::Q1Plus, PotentialKind::Q1Minus]);
            } else {
                out.push(PotentialKind::Q1);
            }
            if cert.needs_cut(2) {
                out.extend([PotentialKind::Q2Plus, PotentialKind::Q2Minus]);
            } else {
                out.push(PotentialKind::Q2);
            }
            out.push(PotentialKind::Q3);
        }
    }
    out
}

pub fn element(grid: &StripGrid, potential: ScalarPotential) -> BasisElement {
    let (limit_plus, limit_minus) = achieved_limits(&potential);
    let checks = ElementChecks {
        curl: curl_residual(&potential),
        divergence: divergence_residual(grid, &potential),
        boundary: boundary_residual(grid, &potential),
    };
    BasisElement {
        potential,
        limit_plus,
        limit_minus,
        checks,
    }
}

/// Solves every generator of the space for the grid obstacle, checks the
/// discrete identities and the linear independence of the limit vectors.
pub fn compute_basis(space: Space, case: CaseId, grid: &StripGrid) -> Result<CohomologyBasis> {
    let obstacle = grid
        .obstacle()
        .ok_or_else(|| Error::InvalidGrid("cohomology bases need an obstacle".into()))?;
    if obstacle.case() != case {
        return Err(Error::InvalidGrid(format!("grid holds a {} obstacle, not {}", obstacle.case(), case)));
    }
    let cert = grid.certificate().expect("obstacle present").clone();
    let kinds = basis_kinds(space, &cert);
    let potentials: Vec<ScalarPotential> = kinds
        .par_iter()
        .map(|&k| solve_potential(grid, k))
        .collect::<Result<_>>()?;
    let elements: Vec<BasisElement> = potentials.into_par_iter().map(|p| element(grid, p)).collect();

    let dim = elements.len();
    let m = DMatrix::from_fn(dim, 6, |r, c| elements[r].limit_vector()[c]);
    let gram = &m * m.transpose();
    let eig = gram.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    let gram_rank = eig.eigenvalues.iter().filter(|&&l| l > 1e-10 * max).count();
    let gram_condition = if min > 0.0 { max / min } else { f64::INFINITY };
    Ok(CohomologyBasis {
        space,
        case,
        certificate: cert,
        elements,
        dimension: dim,
        gram,
        gram_condition,
        gram_rank,
    })
}
