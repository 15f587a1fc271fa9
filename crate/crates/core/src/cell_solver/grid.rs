use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::{topology_certificate, CanonicalObstacle, TopologyCertificate};
use crate::linalg::{Csr, KrylovOptions};

/// How the linear systems of the cell problems are solved.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LinearSolver {
    Krylov(KrylovOptions),
    /// Dense LU, available for `n <= 8` as an oracle.
    Dense,
}

/// Relative residual targeted by the cell solves.
pub const CELL_TOLERANCE: f64 = 1e-12;

/// Discretization of the truncated strip `(0,1)^2 x (-L, L)` at reference
/// scale `delta = 1`.
///
/// Dirichlet potentials live on nodes `(i h, j h, -L + k h)`, Neumann
/// potentials on voxel centres. Both layouts are periodic in `y1`, `y2`.
pub struct StripGrid {
    n: usize,
    half_height: usize,
    obstacle: Option<CanonicalObstacle>,
    node_fixed: Vec<bool>,
    cell_solid: Vec<bool>,
    /// Edges lying on the closed obstacle, per axis, node-layout indexing.
    edge_closed: [Vec<bool>; 3],
    pub solver: LinearSolver,
    pub(crate) node_operator: OnceLock<NodeOperator>,
    pub(crate) cell_operator: OnceLock<CellOperator>,
    certificate: OnceLock<Option<TopologyCertificate>>,
}

pub(crate) struct NodeOperator {
    pub matrix: Csr<f64>,
    /// Unknown index per node, `None` for Dirichlet nodes.
    pub unknown: Vec<Option<usize>>,
    pub nodes: Vec<usize>,
}

pub(crate) struct CellOperator {
    pub matrix: Csr<f64>,
    pub cells: Vec<usize>,
}

impl StripGrid {
    /// `n` cells per period (a multiple of 8), strip truncated at
    /// `|y3| = half_height`. `obstacle = None` gives the empty strip.
    pub fn new(obstacle: Option<&CanonicalObstacle>, n: usize, half_height: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(8) {
            return Err(Error::InvalidGrid(format!("n = {n} must be a positive multiple of 8")));
        }
        if half_height == 0 {
            return Err(Error::InvalidGrid("L must be positive".into()));
        }
        let nz = 2 * n * half_height;
        let k0 = (n * half_height) as i64;
        let m = n as i64;
        let contains = |p: [i64; 3]| obstacle.is_some_and(|o| o.contains_doubled(p, m));

        let mut node_fixed = vec![false; n * n * (nz + 1)];
        for k in 0..=nz {
            for j in 0..n {
                for i in 0..n {
                    node_fixed[i + n * (j + n * k)] = contains([2 * i as i64, 2 * j as i64, 2 * (k as i64 - k0)]);
                }
            }
        }
        let mut cell_solid = vec![false; n * n * nz];
        for k in 0..nz {
            for j in 0..n {
                for i in 0..n {
                    cell_solid[i + n * (j + n * k)] =
                        contains([2 * i as i64 + 1, 2 * j as i64 + 1, 2 * (k as i64 - k0) + 1]);
                }
            }
        }
        let mut edge_closed = [
            vec![false; n * n * (nz + 1)],
            vec![false; n * n * (nz + 1)],
            vec![false; n * n * nz],
        ];
        for (axis, mask) in edge_closed.iter_mut().enumerate() {
            let layers = if axis == 2 { nz } else { nz + 1 };
            for k in 0..layers {
                for j in 0..n {
                    for i in 0..n {
                        let mut p = [2 * i as i64, 2 * j as i64, 2 * (k as i64 - k0)];
                        p[axis] += 1;
                        mask[i + n * (j + n * k)] = contains(p);
                    }
                }
            }
        }
        Ok(StripGrid {
            n,
            half_height,
            obstacle: obstacle.cloned(),
            node_fixed,
            cell_solid,
            edge_closed,
            solver: LinearSolver::Krylov(KrylovOptions {
                tolerance: CELL_TOLERANCE,
                max_iterations: 200_000,
            }),
            node_operator: OnceLock::new(),
            cell_operator: OnceLock::new(),
            certificate: OnceLock::new(),
        })
    }

    /// Switches to the dense direct solver (oracle use, `n <= 8` only).
    pub fn with_dense_solver(mut self) -> Result<Self> {
        if self.n > 8 {
            return Err(Error::InvalidGrid("dense cell solves are limited to n <= 8".into()));
        }
        self.solver = LinearSolver::Dense;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_height(&self) -> usize {
        self.half_height
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Number of cell layers; node layers are `nz + 1`.
    pub fn nz(&self) -> usize {
        2 * self.n * self.half_height
    }

    /// Node layer of the plane `y3 = 0`.
    pub fn mid_layer(&self) -> usize {
        self.n * self.half_height
    }

    pub fn obstacle(&self) -> Option<&CanonicalObstacle> {
        self.obstacle.as_ref()
    }

    pub fn certificate(&self) -> Option<&TopologyCertificate> {
        self.certificate
            .get_or_init(|| self.obstacle.as_ref().map(topology_certificate))
            .as_ref()
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.n * (j + self.n * k)
    }

    pub fn is_fixed_node(&self, idx: usize) -> bool {
        self.node_fixed[idx]
    }

    pub fn is_solid_cell(&self, idx: usize) -> bool {
        self.cell_solid[idx]
    }

    pub fn has_fixed_nodes(&self) -> bool {
        self.node_fixed.iter().any(|&b| b)
    }

    pub fn edge_on_obstacle(&self, axis: usize, idx: usize) -> bool {
        self.edge_closed[axis][idx]
    }

    pub fn node_y3(&self, k: usize) -> f64 {
        -(self.half_height as f64) + k as f64 * self.h()
    }

    pub fn cell_y3(&self, k: usize) -> f64 {
        -(self.half_height as f64) + (k as f64 + 0.5) * self.h()
    }

    #[inline]
    pub(crate) fn wrap(&self, i: usize, d: isize) -> usize {
        (i as isize + d).rem_euclid(self.n as isize) as usize
    }
}
