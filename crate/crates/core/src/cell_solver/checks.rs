//! Discrete identities and limits of computed gradient fields.

use super::grid::StripGrid;
use super::potentials::{Layout, ScalarPotential, StaggeredField};

fn lateral_layers(f: &StaggeredField, nz: usize) -> usize {
    match f.layout {
        Layout::Nodes => nz + 1,
        Layout::Cells => nz,
    }
}

fn vertical_layers(f: &StaggeredField, nz: usize) -> usize {
    match f.layout {
        Layout::Nodes => nz,
        Layout::Cells => nz - 1,
    }
}

/// Field value on the staggered location `(axis, i, j, k)`; `None` outside
/// the grid or on an inactive face.
fn at(f: &StaggeredField, n: usize, nz: usize, axis: usize, i: usize, j: usize, k: usize) -> Option<f64> {
    let layers = if axis == 2 { vertical_layers(f, nz) } else { lateral_layers(f, nz) };
    if k >= layers {
        return None;
    }
    let idx = (i % n) + n * ((j % n) + n * k);
    f.active[axis][idx].then(|| f.components[axis][idx])
}

fn max_abs(f: &StaggeredField) -> f64 {
    f.components
        .iter()
        .zip(&f.active)
        .flat_map(|(c, a)| c.iter().zip(a).filter(|(_, &on)| on).map(|(v, _)| v.abs()))
        .fold(0.0, f64::max)
}

/// Largest circulation of the gradient around an elementary loop (primal
/// faces for the node layout, dual loops around interior edges for the cell
/// layout), relative to the largest gradient entry.
pub fn curl_residual(p: &ScalarPotential) -> f64 {
    let f = &p.gradient;
    let (n, nz) = (p.n, p.nz());
    let mut worst: f64 = 0.0;
    for (a, b) in [(0usize, 1usize), (0, 2), (1, 2)] {
        for k in 0..=nz {
            for j in 0..n {
                for i in 0..n {
                    let shift = |axis: usize| {
                        let mut c = [i, j, k];
                        c[axis] += 1;
                        c
                    };
                    let sa = shift(a);
                    let sb = shift(b);
                    let loop_values = [
                        at(f, n, nz, a, i, j, k),
                        at(f, n, nz, b, sa[0], sa[1], sa[2]),
                        at(f, n, nz, a, sb[0], sb[1], sb[2]),
                        at(f, n, nz, b, i, j, k),
                    ];
                    if let [Some(v0), Some(v1), Some(v2), Some(v3)] = loop_values {
                        worst = worst.max((v0 + v1 - v2 - v3).abs());
                    }
                }
            }
        }
    }
    relative(worst, max_abs(f))
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        value / scale
    } else {
        value
    }
}

/// Largest discrete divergence (flux balance) at unknown locations,
/// relative to the largest gradient entry.
pub fn divergence_residual(grid: &StripGrid, p: &ScalarPotential) -> f64 {
    let f = &p.gradient;
    let (n, nz) = (p.n, p.nz());
    let mut worst: f64 = 0.0;
    match f.layout {
        Layout::Nodes => {
            for k in 0..=nz {
                let w = if k == 0 || k == nz { 0.5 } else { 1.0 };
                for j in 0..n {
                    for i in 0..n {
                        if grid.is_fixed_node(grid.node(i, j, k)) {
                            continue;
                        }
                        let im = grid.wrap(i, -1);
                        let jm = grid.wrap(j, -1);
                        let c = &f.components;
                        let mut div = w
                            * (c[0][grid.node(i, j, k)] - c[0][grid.node(im, j, k)] + c[1][grid.node(i, j, k)]
                                - c[1][grid.node(i, jm, k)]);
                        if k < nz {
                            div += c[2][grid.node(i, j, k)];
                        } else {
                            div += f.top_flux;
                        }
                        if k > 0 {
                            div -= c[2][grid.node(i, j, k - 1)];
                        } else {
                            div -= f.bottom_flux;
                        }
                        worst = worst.max(div.abs());
                    }
                }
            }
        }
        Layout::Cells => {
            for k in 0..nz {
                for j in 0..n {
                    for i in 0..n {
                        if grid.is_solid_cell(grid.cell(i, j, k)) {
                            continue;
                        }
                        let get = |axis, i, j, k| at(f, n, nz, axis, i, j, k).unwrap_or(0.0);
                        let mut div = get(0, i, j, k) - get(0, grid.wrap(i, -1), j, k) + get(1, i, j, k)
                            - get(1, i, grid.wrap(j, -1), k);
                        div += if k + 1 < nz { get(2, i, j, k) } else { f.top_flux };
                        div -= if k > 0 { get(2, i, j, k - 1) } else { f.bottom_flux };
                        worst = worst.max(div.abs());
                    }
                }
            }
        }
    }
    relative(worst, max_abs(f))
}

/// Boundary condition defect relative to the largest gradient entry:
/// tangential gradient on obstacle edges (node layout) or normal gradient
/// on fluid/solid faces (cell layout).
pub fn boundary_residual(grid: &StripGrid, p: &ScalarPotential) -> f64 {
    let f = &p.gradient;
    let (n, nz) = (p.n, p.nz());
    let mut worst: f64 = 0.0;
    match f.layout {
        Layout::Nodes => {
            for axis in 0..3 {
                for (idx, v) in f.components[axis].iter().enumerate() {
                    if grid.edge_on_obstacle(axis, idx) {
                        worst = worst.max(v.abs());
                    }
                }
            }
        }
        Layout::Cells => {
            for k in 0..nz {
                for j in 0..n {
                    for i in 0..n {
                        let here = grid.cell(i, j, k);
                        let mut nbs = vec![(0, grid.cell(grid.wrap(i, 1), j, k)), (1, grid.cell(i, grid.wrap(j, 1), k))];
                        if k + 1 < nz {
                            nbs.push((2, grid.cell(i, j, k + 1)));
                        }
                        for (axis, nb) in nbs {
                            if grid.is_solid_cell(here) != grid.is_solid_cell(nb) {
                                // the stored flux through a fluid/solid face
                                worst = worst.max(f.components[axis][here].abs());
                            }
                        }
                    }
                }
            }
        }
    }
    relative(worst, max_abs(f))
}

/// Largest deviation between the reconstructed and prescribed cut jumps.
pub fn jump_residual(p: &ScalarPotential) -> f64 {
    p.reconstructed_jumps()
        .iter()
        .zip(&p.cut_jumps)
        .map(|((_, got), (_, want))| (got - want).abs())
        .fold(0.0, f64::max)
}

/// Staggered layers sampled for the plane `y3 = t` on the upper (`upper =
/// true`) or lower side: `(lateral layer, vertical layer)`.
fn plane_layers(p: &ScalarPotential, steps: usize, upper: bool) -> (usize, usize) {
    let mid = p.n * p.half_height;
    let nz = p.nz();
    match (p.layout(), upper) {
        (Layout::Nodes, true) => ((mid + steps).min(nz), (mid + steps).min(nz - 1)),
        (Layout::Nodes, false) => (mid - steps, (mid - steps).min(nz - 1)),
        (Layout::Cells, true) => ((mid + steps).min(nz - 1), (mid + steps).min(nz - 2)),
        (Layout::Cells, false) => (mid - steps.max(1), mid - steps.max(1)),
    }
}

fn plane_values(p: &ScalarPotential, lateral: usize, vertical: usize) -> [Vec<f64>; 3] {
    let f = &p.gradient;
    let (n, nz) = (p.n, p.nz());
    let mut out: [Vec<f64>; 3] = Default::default();
    for j in 0..n {
        for i in 0..n {
            for (axis, slot) in out.iter_mut().enumerate() {
                let k = if axis == 2 { vertical } else { lateral };
                if let Some(v) = at(f, n, nz, axis, i, j, k) {
                    slot.push(v);
                }
            }
        }
    }
    out
}

/// Lateral means of the gradient on the outermost staggered layers:
/// `(limit at +L, limit at -L)`.
pub fn achieved_limits(p: &ScalarPotential) -> ([f64; 3], [f64; 3]) {
    let steps = p.n * p.half_height;
    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    let side = |upper: bool| {
        let (lat, ver) = plane_layers(p, steps, upper);
        let vals = plane_values(p, lat, ver);
        [mean(&vals[0]), mean(&vals[1]), mean(&vals[2])]
    };
    (side(true), side(false))
}

/// Deviation `max |grad - limit|` on the plane `y3 = t` (`t` in periods,
/// positive or negative).
pub fn plane_deviation(p: &ScalarPotential, t: i64, limits: &([f64; 3], [f64; 3])) -> f64 {
    let steps = t.unsigned_abs() as usize * p.n;
    let upper = t >= 0;
    let (lat, ver) = plane_layers(p, steps, upper);
    let limit = if upper { limits.0 } else { limits.1 };
    let vals = plane_values(p, lat, ver);
    vals.iter()
        .zip(limit)
        .flat_map(|(vs, l)| vs.iter().map(move |v| (v - l).abs()))
        .fold(0.0, f64::max)
}
