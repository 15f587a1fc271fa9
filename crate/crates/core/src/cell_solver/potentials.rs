//! Harmonic cell potentials on the truncated periodic strip.
//!
//! Every potential is split as `periodic part + affine part`. The solver
//! computes the periodic part; gradients are assembled on staggered
//! locations (edges for the node layout, voxel faces for the cell layout)
//! by adding the constant gradient of the affine part and, across cut
//! faces, subtracting the prescribed jump.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{CutKind, CutSet, TopologyCertificate};
use crate::linalg::{conjugate_gradient, dense_solve, CsrBuilder, SolveStats};

use super::grid::{CellOperator, LinearSolver, NodeOperator, StripGrid};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PotentialKind {
    P3Plus,
    P3Minus,
    P1,
    P2,
    Q1,
    Q2,
    Q3,
    Q1Plus,
    Q1Minus,
    Q2Plus,
    Q2Minus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// Values on grid nodes, gradient on edges (Dirichlet problems).
    Nodes,
    /// Values on voxel centres, gradient on voxel faces (Neumann problems).
    Cells,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

impl PotentialKind {
    pub fn name(self) -> &'static str {
        match self {
            PotentialKind::P3Plus => "p3+",
            PotentialKind::P3Minus => "p3-",
            PotentialKind::P1 => "p1",
            PotentialKind::P2 => "p2",
            PotentialKind::Q1 => "q1",
            PotentialKind::Q2 => "q2",
            PotentialKind::Q3 => "q3",
            PotentialKind::Q1Plus => "q1+",
            PotentialKind::Q1Minus => "q1-",
            PotentialKind::Q2Plus => "q2+",
            PotentialKind::Q2Minus => "q2-",
        }
    }

    pub fn layout(self) -> Layout {
        match self {
            PotentialKind::P3Plus | PotentialKind::P3Minus | PotentialKind::P1 | PotentialKind::P2 => Layout::Nodes,
            _ => Layout::Cells,
        }
    }

    /// Gradient limits `(y3 -> +inf, y3 -> -inf)` the potential is built to have.
    pub fn expected_limits(self) -> ([f64; 3], [f64; 3]) {
        let e = |a: usize| {
            let mut v = [0.0; 3];
            v[a] = 1.0;
            v
        };
        let zero = [0.0; 3];
        match self {
            PotentialKind::P3Plus => (e(2), zero),
            PotentialKind::P3Minus => (zero, e(2)),
            PotentialKind::P1 | PotentialKind::Q1 => (e(0), e(0)),
            PotentialKind::P2 | PotentialKind::Q2 => (e(1), e(1)),
            PotentialKind::Q3 => (e(2), e(2)),
            PotentialKind::Q1Plus => (e(0), zero),
            PotentialKind::Q1Minus => (zero, e(0)),
            PotentialKind::Q2Plus => (e(1), zero),
            PotentialKind::Q2Minus => (zero, e(1)),
        }
    }
}

impl fmt::Display for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Both,
    Upper,
    Lower,
}

/// Linear-growth term `y_axis` (restricted to one half of the strip for
/// cut potentials).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AffinePart {
    pub axis: Option<usize>,
    pub side: Side,
}

impl AffinePart {
    const NONE: AffinePart = AffinePart { axis: None, side: Side::Both };
}

/// Gradient on staggered locations.
///
/// Node layout: component `a` lives on the edges `node -> node + e_a`
/// (`n*n*(nz+1)` entries laterally, `n*n*nz` vertically). Cell layout:
/// component `a` lives on the faces between voxel `c` and `c + e_a`
/// (`n*n*nz` laterally, `n*n*(nz-1)` interior faces vertically); faces
/// touching the obstacle are inactive and carry zero flux.
#[derive(Clone, Debug)]
pub struct StaggeredField {
    pub layout: Layout,
    pub components: [Vec<f64>; 3],
    pub active: [Vec<bool>; 3],
    /// Prescribed `d/dy3` at the top and bottom truncation planes.
    pub top_flux: f64,
    pub bottom_flux: f64,
}

#[derive(Clone, Debug)]
pub struct ScalarPotential {
    pub kind: PotentialKind,
    pub n: usize,
    pub half_height: usize,
    /// Periodic part on nodes (node layout) or voxels (cell layout). Solid
    /// voxels hold 0.
    pub values: Vec<f64>,
    pub affine: AffinePart,
    pub gradient: StaggeredField,
    /// Prescribed jumps `[q~]` across cut faces, keyed by the index of the
    /// voxel just below the cut.
    pub cut_jumps: Vec<(usize, f64)>,
    pub stats: SolveStats,
}

impl ScalarPotential {
    pub fn layout(&self) -> Layout {
        self.gradient.layout
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n as f64
    }

    pub fn nz(&self) -> usize {
        2 * self.n * self.half_height
    }

    /// Reconstructs the one-sided traces of the periodic part at `y3 = 0`
    /// from the voxel values and the (continuous) normal derivative on the
    /// cut face, and returns `(voxel below, trace above - trace below)` for
    /// every cut face.
    pub fn reconstructed_jumps(&self) -> Vec<(usize, f64)> {
        let n = self.n;
        let plane = n * n;
        let h = self.h();
        self.cut_jumps
            .iter()
            .map(|&(below, _)| {
                let above = below + plane;
                let normal = self.gradient.components[2][below];
                let upper = self.values[above] - 0.5 * h * normal;
                let lower = self.values[below] + 0.5 * h * normal;
                (below, upper - lower)
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// operators

fn node_neighbours(grid: &StripGrid, i: usize, j: usize, k: usize) -> Vec<(usize, f64, usize, f64)> {
    let nz = grid.nz();
    let lateral = if k == 0 || k == nz { 0.5 } else { 1.0 };
    let mut out = Vec::with_capacity(6);
    out.push((grid.node(grid.wrap(i, 1), j, k), lateral, 0, 1.0));
    out.push((grid.node(grid.wrap(i, -1), j, k), lateral, 0, -1.0));
    out.push((grid.node(i, grid.wrap(j, 1), k), lateral, 1, 1.0));
    out.push((grid.node(i, grid.wrap(j, -1), k), lateral, 1, -1.0));
    if k < nz {
        out.push((grid.node(i, j, k + 1), 1.0, 2, 1.0));
    }
    if k > 0 {
        out.push((grid.node(i, j, k - 1), 1.0, 2, -1.0));
    }
    out
}

fn cell_neighbours(grid: &StripGrid, i: usize, j: usize, k: usize) -> Vec<(usize, usize, f64)> {
    let nz = grid.nz();
    let mut out = Vec::with_capacity(6);
    out.push((grid.cell(grid.wrap(i, 1), j, k), 0, 1.0));
    out.push((grid.cell(grid.wrap(i, -1), j, k), 0, -1.0));
    out.push((grid.cell(i, grid.wrap(j, 1), k), 1, 1.0));
    out.push((grid.cell(i, grid.wrap(j, -1), k), 1, -1.0));
    if k + 1 < nz {
        out.push((grid.cell(i, j, k + 1), 2, 1.0));
    }
    if k > 0 {
        out.push((grid.cell(i, j, k - 1), 2, -1.0));
    }
    out.into_iter().filter(|&(c, _, _)| !grid.is_solid_cell(c)).collect()
}

fn node_operator(grid: &StripGrid) -> &NodeOperator {
    grid.node_operator.get_or_init(|| {
        let n = grid.n();
        let nz = grid.nz();
        let total = n * n * (nz + 1);
        let mut unknown = vec![None; total];
        let mut nodes = Vec::new();
        for (idx, u) in unknown.iter_mut().enumerate() {
            if !grid.is_fixed_node(idx) {
                *u = Some(nodes.len());
                nodes.push(idx);
            }
        }
        let mut b = CsrBuilder::new(nodes.len());
        for &idx in &nodes {
            let (i, j, k) = (idx % n, (idx / n) % n, idx / (n * n));
            let mut diag = 0.0;
            for (nb, w, _, _) in node_neighbours(grid, i, j, k) {
                diag += w;
                if let Some(u) = unknown[nb] {
                    b.push(u, -w);
                }
            }
            b.push(unknown[idx].unwrap(), diag);
            b.finish_row();
        }
        NodeOperator {
            matrix: b.build(),
            unknown,
            nodes,
        }
    })
}

fn cell_operator(grid: &StripGrid) -> &CellOperator {
    grid.cell_operator.get_or_init(|| {
        let n = grid.n();
        let total = n * n * grid.nz();
        let mut unknown = vec![None; total];
        let mut cells = Vec::new();
        for (idx, u) in unknown.iter_mut().enumerate() {
            if !grid.is_solid_cell(idx) {
                *u = Some(cells.len());
                cells.push(idx);
            }
        }
        let mut b = CsrBuilder::new(cells.len());
        for &idx in &cells {
            let (i, j, k) = (idx % n, (idx / n) % n, idx / (n * n));
            let nbs = cell_neighbours(grid, i, j, k);
            for &(nb, _, _) in &nbs {
                b.push(unknown[nb].unwrap(), -1.0);
            }
            b.push(unknown[idx].unwrap(), nbs.len() as f64);
            b.finish_row();
        }
        CellOperator {
            matrix: b.build(),
            cells,
        }
    })
}

// ---------------------------------------------------------------------------
// node (Dirichlet) problems

struct NodeProblem<'a> {
    /// Constant gradient of the affine part.
    affine: [f64; 3],
    /// Value of the periodic part on Dirichlet nodes.
    fixed: &'a dyn Fn(usize, usize, usize) -> f64,
    top_dz: f64,
    bottom_dz: f64,
}

fn solve_nodes(grid: &StripGrid, kind: PotentialKind, affine: AffinePart, problem: NodeProblem<'_>) -> Result<ScalarPotential> {
    if !grid.has_fixed_nodes() {
        return Err(Error::InvalidGrid(format!("{kind} needs a nonempty obstacle boundary")));
    }
    let op = node_operator(grid);
    let n = grid.n();
    let nz = grid.nz();
    let h = grid.h();
    let total = n * n * (nz + 1);

    let mut values = vec![0.0; total];
    for (idx, v) in values.iter_mut().enumerate() {
        if grid.is_fixed_node(idx) {
            *v = (problem.fixed)(idx % n, (idx / n) % n, idx / (n * n));
        }
    }
    let mut rhs = vec![0.0; op.nodes.len()];
    for (u, &idx) in op.nodes.iter().enumerate() {
        let (i, j, k) = (idx % n, (idx / n) % n, idx / (n * n));
        let mut flux = 0.0;
        let mut b = 0.0;
        for (nb, w, axis, sign) in node_neighbours(grid, i, j, k) {
            flux += w * sign * problem.affine[axis];
            if op.unknown[nb].is_none() {
                b += w * values[nb];
            }
        }
        if k == nz {
            flux += problem.top_dz;
        }
        if k == 0 {
            flux -= problem.bottom_dz;
        }
        rhs[u] = b + h * flux;
    }
    let (solution, stats) = solve_system(grid, &op.matrix, &rhs, false)?;
    for (u, &idx) in op.nodes.iter().enumerate() {
        values[idx] = solution[u];
    }

    let mut components = [vec![0.0; total], vec![0.0; total], vec![0.0; n * n * nz]];
    for k in 0..=nz {
        for j in 0..n {
            for i in 0..n {
                let here = values[grid.node(i, j, k)];
                let idx = grid.node(i, j, k);
                components[0][idx] = (values[grid.node(grid.wrap(i, 1), j, k)] - here) / h + problem.affine[0];
                components[1][idx] = (values[grid.node(i, grid.wrap(j, 1), k)] - here) / h + problem.affine[1];
                if k < nz {
                    components[2][idx] = (values[grid.node(i, j, k + 1)] - here) / h + problem.affine[2];
                }
            }
        }
    }
    let active = [vec![true; total], vec![true; total], vec![true; n * n * nz]];
    Ok(ScalarPotential {
        kind,
        n,
        half_height: grid.half_height(),
        values,
        affine,
        gradient: StaggeredField {
            layout: Layout::Nodes,
            components,
            active,
            top_flux: problem.top_dz,
            bottom_flux: problem.bottom_dz,
        },
        cut_jumps: Vec::new(),
        stats,
    })
}

fn solve_system(grid: &StripGrid, matrix: &crate::linalg::Csr<f64>, rhs: &[f64], singular: bool) -> Result<(Vec<f64>, SolveStats)> {
    let mut rhs = rhs.to_vec();
    if singular {
        let mean = rhs.iter().sum::<f64>() / rhs.len() as f64;
        rhs.iter_mut().for_each(|v| *v -= mean);
    }
    let mut x = match grid.solver {
        LinearSolver::Krylov(opts) => {
            let mut x = vec![0.0; rhs.len()];
            let stats = conjugate_gradient(matrix, &rhs, &mut x, opts)?;
            if singular {
                remove_mean(&mut x);
            }
            return Ok((x, stats));
        }
        LinearSolver::Dense => {
            if singular {
                // A + 11^T / N has the mean-zero solution of A x = rhs
                let n = rhs.len();
                let mut b = CsrBuilder::new(n);
                for i in 0..n {
                    for (c, v) in matrix.row(i) {
                        b.push(c, v);
                    }
                    for c in 0..n {
                        b.push(c, 1.0 / n as f64);
                    }
                    b.finish_row();
                }
                dense_solve(&b.build(), &rhs)?
            } else {
                dense_solve(matrix, &rhs)?
            }
        }
    };
    if singular {
        remove_mean(&mut x);
    }
    let residual = crate::linalg::relative_residual(matrix, &rhs, &x);
    Ok((
        x,
        SolveStats {
            iterations: 0,
            relative_residual: residual,
        },
    ))
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// `p3^+` (gradient `e3` above, `0` below) or `p3^-`, vanishing on the
/// obstacle.
pub fn solve_p3(grid: &StripGrid, sign: Sign) -> Result<ScalarPotential> {
    let (kind, top, bottom) = match sign {
        Sign::Plus => (PotentialKind::P3Plus, 1.0, 0.0),
        Sign::Minus => (PotentialKind::P3Minus, 0.0, 1.0),
    };
    solve_nodes(
        grid,
        kind,
        AffinePart::NONE,
        NodeProblem {
            affine: [0.0; 3],
            fixed: &|_, _, _| 0.0,
            top_dz: top,
            bottom_dz: bottom,
        },
    )
}

/// `p_dir = p~ + y_dir` where `p~` is periodic, harmonic and equal to the
/// sawtooth `-(y_dir mod 1)` on the obstacle.
pub fn solve_p_tangential(grid: &StripGrid, direction: usize, cert: &TopologyCertificate) -> Result<ScalarPotential> {
    let kind = match direction {
        1 => PotentialKind::P1,
        2 => PotentialKind::P2,
        _ => return Err(Error::InvalidGrid(format!("lateral direction must be 1 or 2, got {direction}"))),
    };
    if !cert.constructible(direction) {
        return Err(Error::NotConstructible(kind.name().to_string()));
    }
    let h = grid.h();
    let axis = direction - 1;
    let mut affine = [0.0; 3];
    affine[axis] = 1.0;
    let sawtooth = move |i: usize, j: usize, _k: usize| -(if axis == 0 { i } else { j } as f64) * h;
    solve_nodes(
        grid,
        kind,
        AffinePart {
            axis: Some(axis),
            side: Side::Both,
        },
        NodeProblem {
            affine,
            fixed: &sawtooth,
            top_dz: 0.0,
            bottom_dz: 0.0,
        },
    )
}

// ---------------------------------------------------------------------------
// cell (Neumann) problems

struct CellProblem<'a> {
    /// Known part of the face gradient for the face between voxel
    /// `(i, j, k)` and its `+e_axis` neighbour.
    face_source: &'a dyn Fn(usize, usize, usize, usize) -> f64,
    top_dz: f64,
    bottom_dz: f64,
}

fn solve_cells(
    grid: &StripGrid,
    kind: PotentialKind,
    affine: AffinePart,
    problem: CellProblem<'_>,
    cut_jumps: Vec<(usize, f64)>,
) -> Result<ScalarPotential> {
    let op = cell_operator(grid);
    let n = grid.n();
    let nz = grid.nz();
    let h = grid.h();
    let total = n * n * nz;

    let mut rhs = vec![0.0; op.cells.len()];
    for (u, &idx) in op.cells.iter().enumerate() {
        let (i, j, k) = (idx % n, (idx / n) % n, idx / (n * n));
        let mut flux = 0.0;
        for (_, axis, sign) in cell_neighbours(grid, i, j, k) {
            let src = if sign > 0.0 {
                (problem.face_source)(axis, i, j, k)
            } else {
                let (pi, pj, pk) = match axis {
                    0 => (grid.wrap(i, -1), j, k),
                    1 => (i, grid.wrap(j, -1), k),
                    _ => (i, j, k - 1),
                };
                -(problem.face_source)(axis, pi, pj, pk)
            };
            flux += src;
        }
        if k + 1 == nz {
            flux += problem.top_dz;
        }
        if k == 0 {
            flux -= problem.bottom_dz;
        }
        rhs[u] = h * flux;
    }
    let (solution, stats) = solve_system(grid, &op.matrix, &rhs, true)?;
    let mut values = vec![0.0; total];
    for (u, &idx) in op.cells.iter().enumerate() {
        values[idx] = solution[u];
    }
    // gauge: the periodic part has zero mean over the top voxel layer
    let top: Vec<f64> = (0..n * n).map(|c| c + n * n * (nz - 1)).filter(|&c| !grid.is_solid_cell(c)).map(|c| values[c]).collect();
    let shift = top.iter().sum::<f64>() / top.len() as f64;
    for (idx, v) in values.iter_mut().enumerate() {
        if !grid.is_solid_cell(idx) {
            *v -= shift;
        }
    }

    let mut components = [vec![0.0; total], vec![0.0; total], vec![0.0; n * n * (nz - 1)]];
    let mut active = [vec![false; total], vec![false; total], vec![false; n * n * (nz - 1)]];
    for k in 0..nz {
        for j in 0..n {
            for i in 0..n {
                let idx = grid.cell(i, j, k);
                if grid.is_solid_cell(idx) {
                    continue;
                }
                let mut nbs = vec![(0, grid.cell(grid.wrap(i, 1), j, k)), (1, grid.cell(i, grid.wrap(j, 1), k))];
                if k + 1 < nz {
                    nbs.push((2, grid.cell(i, j, k + 1)));
                }
                for (axis, nb) in nbs {
                    if grid.is_solid_cell(nb) {
                        continue;
                    }
                    components[axis][idx] = (values[nb] - values[idx]) / h + (problem.face_source)(axis, i, j, k);
                    active[axis][idx] = true;
                }
            }
        }
    }
    Ok(ScalarPotential {
        kind,
        n,
        half_height: grid.half_height(),
        values,
        affine,
        gradient: StaggeredField {
            layout: Layout::Cells,
            components,
            active,
            top_flux: problem.top_dz,
            bottom_flux: problem.bottom_dz,
        },
        cut_jumps,
        stats,
    })
}

/// `q3 = q~ + y3` with homogeneous Neumann data on the obstacle and
/// `q3 - y3` of zero mean on the top truncation plane.
pub fn solve_q3(grid: &StripGrid) -> Result<ScalarPotential> {
    solve_cells(
        grid,
        PotentialKind::Q3,
        AffinePart {
            axis: Some(2),
            side: Side::Both,
        },
        CellProblem {
            face_source: &|axis, _, _, _| if axis == 2 { 1.0 } else { 0.0 },
            top_dz: 1.0,
            bottom_dz: 1.0,
        },
        Vec::new(),
    )
}

/// Uncut `q_dir = q~ + y_dir` (Neumann data `-e_dir . n` for `q~`).
pub fn solve_q_tangential(grid: &StripGrid, direction: usize) -> Result<ScalarPotential> {
    let kind = match direction {
        1 => PotentialKind::Q1,
        2 => PotentialKind::Q2,
        _ => return Err(Error::InvalidGrid(format!("lateral direction must be 1 or 2, got {direction}"))),
    };
    let axis = direction - 1;
    solve_cells(
        grid,
        kind,
        AffinePart {
            axis: Some(axis),
            side: Side::Both,
        },
        CellProblem {
            face_source: &move |a, _, _, _| if a == axis { 1.0 } else { 0.0 },
            top_dz: 0.0,
            bottom_dz: 0.0,
        },
        Vec::new(),
    )
}

/// One-sided cut potential `q_dir^sign = q~ + y_dir 1_{B^sign}` with jump
/// `[q~] = sign (label - y_dir)` across the cuts at `y3 = 0`.
pub fn solve_q_cut(grid: &StripGrid, direction: usize, sign: Sign, cuts: &CutSet) -> Result<ScalarPotential> {
    let kind = match (direction, sign) {
        (1, Sign::Plus) => PotentialKind::Q1Plus,
        (1, Sign::Minus) => PotentialKind::Q1Minus,
        (2, Sign::Plus) => PotentialKind::Q2Plus,
        (2, Sign::Minus) => PotentialKind::Q2Minus,
        _ => return Err(Error::CutMismatch(format!("direction {direction}"))),
    };
    if !cuts.supports(direction) {
        return Err(Error::CutMismatch(format!(
            "{kind}: {} cuts carry jumps only along {:?}",
            match cuts.kind {
                CutKind::Strips => "strip",
                CutKind::Holes => "hole",
            },
            cuts.jump_directions
        )));
    }
    if let Some(cert) = grid.certificate() {
        if cert.cuts_required.as_ref() != Some(cuts) {
            return Err(Error::CutMismatch(format!("{kind}: cut set does not match the grid obstacle")));
        }
    } else {
        return Err(Error::CutMismatch(format!("{kind}: the empty strip has no cuts")));
    }

    let n = grid.n();
    let h = grid.h();
    let axis = direction - 1;
    let mid = grid.mid_layer();
    let below = mid - 1;
    // prescribed jump on each fluid face of the plane y3 = 0
    let mut jump = vec![f64::NAN; n * n];
    let mut cut_jumps = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let lower = grid.cell(i, j, below);
            let upper = grid.cell(i, j, mid);
            if grid.is_solid_cell(lower) || grid.is_solid_cell(upper) {
                continue;
            }
            let y = [(i as f64 + 0.5) * h, (j as f64 + 0.5) * h];
            let (li, lj) = cuts
                .label_at(y)
                .ok_or_else(|| Error::CutMismatch(format!("fluid face at ({:.4}, {:.4}) lies outside every cut", y[0], y[1])))?;
            let label = if axis == 0 { li } else { lj } as f64;
            let value = sign.factor() * (label - y[axis]);
            jump[i + n * j] = value;
            cut_jumps.push((lower, value));
        }
    }
    let on_side = move |k: usize| match sign {
        Sign::Plus => k >= mid,
        Sign::Minus => k < mid,
    };
    let source = move |a: usize, i: usize, j: usize, k: usize| -> f64 {
        if a == 2 {
            if k == below {
                -jump[i + n * j] / h
            } else {
                0.0
            }
        } else if a == axis && on_side(k) {
            1.0
        } else {
            0.0
        }
    };
    solve_cells(
        grid,
        kind,
        AffinePart {
            axis: Some(axis),
            side: match sign {
                Sign::Plus => Side::Upper,
                Sign::Minus => Side::Lower,
            },
        },
        CellProblem {
            face_source: &source,
            top_dz: 0.0,
            bottom_dz: 0.0,
        },
        cut_jumps,
    )
}

/// Solves the potential of the given kind, consulting the topology
/// certificate of the grid obstacle for constructibility and cuts.
pub fn solve_potential(grid: &StripGrid, kind: PotentialKind) -> Result<ScalarPotential> {
    let cert = grid.certificate();
    let need_cert = || cert.ok_or_else(|| Error::NotConstructible(format!("{kind} (empty strip)")));
    let cuts = || {
        need_cert()?
            .cuts_required
            .as_ref()
            .ok_or_else(|| Error::CutMismatch(format!("{kind}: obstacle requires no cuts")))
    };
    match kind {
        PotentialKind::P3Plus => solve_p3(grid, Sign::Plus),
        PotentialKind::P3Minus => solve_p3(grid, Sign::Minus),
        PotentialKind::P1 => solve_p_tangential(grid, 1, need_cert()?),
        PotentialKind::P2 => solve_p_tangential(grid, 2, need_cert()?),
        PotentialKind::Q1 => solve_q_tangential(grid, 1),
        PotentialKind::Q2 => solve_q_tangential(grid, 2),
        PotentialKind::Q3 => solve_q3(grid),
        PotentialKind::Q1Plus => solve_q_cut(grid, 1, Sign::Plus, cuts()?),
        PotentialKind::Q1Minus => solve_q_cut(grid, 1, Sign::Minus, cuts()?),
        PotentialKind::Q2Plus => solve_q_cut(grid, 2, Sign::Plus, cuts()?),
        PotentialKind::Q2Minus => solve_q_cut(grid, 2, Sign::Minus, cuts()?),
    }
}
