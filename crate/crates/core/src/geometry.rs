//! Canonical obstacles, the voxelized periodic layer and the topological
//! data (windings, cuts) that decide which cell potentials exist.
//!
//! All box coordinates are exact rationals in unit-cell coordinates. Grid
//! membership tests are carried out in integer "doubled" coordinates
//! (units of half a grid cell) so that nodes, edge midpoints and voxel
//! centres can be classified without rounding.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::YeeLattice;

pub type Rational = Rational64;

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// The three layer topologies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CaseId {
    #[serde(rename = "discrete")]
    DiscreteObstacle,
    #[serde(rename = "wires")]
    ParallelWires,
    #[serde(rename = "mesh")]
    WireMesh,
}

impl CaseId {
    pub const ALL: [CaseId; 3] = [CaseId::DiscreteObstacle, CaseId::ParallelWires, CaseId::WireMesh];

    pub fn name(self) -> &'static str {
        match self {
            CaseId::DiscreteObstacle => "discrete",
            CaseId::ParallelWires => "wires",
            CaseId::WireMesh => "mesh",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "discrete" => Ok(CaseId::DiscreteObstacle),
            "wires" => Ok(CaseId::ParallelWires),
            "mesh" => Ok(CaseId::WireMesh),
            other => Err(Error::schema("case", format!("unknown case `{other}` (expected discrete, wires or mesh)"))),
        }
    }
}

/// Closed axis-aligned box `[lo, hi]` in unit-cell coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellBox {
    pub lo: [Rational; 3],
    pub hi: [Rational; 3],
}

impl CellBox {
    pub fn new(lo: [Rational; 3], hi: [Rational; 3]) -> Self {
        CellBox { lo, hi }
    }

    pub fn volume(&self) -> Rational {
        (0..3).map(|a| self.hi[a] - self.lo[a]).product()
    }

    fn spans_full_period(&self, axis: usize) -> bool {
        self.lo[axis] == r(0, 1) && self.hi[axis] == r(1, 1)
    }
}

/// A union of boxes describing the obstacle in one unit cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalObstacle {
    boxes: Vec<CellBox>,
    case: CaseId,
}

/// Builds the canonical obstacle for a case: the centred cube for
/// discrete obstacles, one square wire along `e1`, or the cross of two
/// perpendicular wires.
pub fn build_canonical_obstacle(case: CaseId) -> CanonicalObstacle {
    let boxes = match case {
        CaseId::DiscreteObstacle => vec![CellBox::new(
            [r(1, 4), r(1, 4), r(-1, 4)],
            [r(3, 4), r(3, 4), r(1, 4)],
        )],
        CaseId::ParallelWires => vec![wire_along(0)],
        CaseId::WireMesh => vec![wire_along(0), wire_along(1)],
    };
    CanonicalObstacle { boxes, case }
}

fn wire_along(axis: usize) -> CellBox {
    let mut lo = [r(3, 8), r(3, 8), r(-1, 8)];
    let mut hi = [r(5, 8), r(5, 8), r(1, 8)];
    lo[axis] = r(0, 1);
    hi[axis] = r(1, 1);
    CellBox::new(lo, hi)
}

impl CanonicalObstacle {
    /// Custom box union. Boxes must be non-degenerate and lie inside
    /// `[0,1]^2 x [-1/2, 1/2]`.
    pub fn from_boxes(case: CaseId, boxes: Vec<CellBox>) -> Result<Self> {
        for (n, b) in boxes.iter().enumerate() {
            for a in 0..3 {
                let (min, max) = if a == 2 { (r(-1, 2), r(1, 2)) } else { (r(0, 1), r(1, 1)) };
                if b.lo[a] >= b.hi[a] || b.lo[a] < min || b.hi[a] > max {
                    return Err(Error::schema(
                        format!("boxes[{n}]"),
                        "box must be non-empty and contained in [0,1]^2 x [-1/2,1/2]",
                    ));
                }
            }
        }
        Ok(CanonicalObstacle { boxes, case })
    }

    /// Obstacle filling the whole period over `|y3| <= half_thickness`.
    pub fn full_slab(half_thickness: Rational) -> Self {
        CanonicalObstacle {
            boxes: vec![CellBox::new(
                [r(0, 1), r(0, 1), -half_thickness],
                [r(1, 1), r(1, 1), half_thickness],
            )],
            case: CaseId::WireMesh,
        }
    }

    pub fn boxes(&self) -> &[CellBox] {
        &self.boxes
    }

    pub fn case(&self) -> CaseId {
        self.case
    }

    /// Smallest `m` such that every box face lies on a plane of the grid
    /// with `m` cells per period.
    pub fn resolution_unit(&self) -> i64 {
        let mut unit = 1i64;
        for b in &self.boxes {
            for v in b.lo.iter().chain(b.hi.iter()) {
                unit = lcm(unit, *v.denom());
            }
        }
        unit
    }

    /// Closed membership of a point given in doubled units of a grid with
    /// `m` cells per period. Lateral coordinates are taken modulo the
    /// period; `m` must be a multiple of [`Self::resolution_unit`].
    pub fn contains_doubled(&self, p: [i64; 3], m: i64) -> bool {
        let period = 2 * m;
        let x = p[0].rem_euclid(period);
        let y = p[1].rem_euclid(period);
        self.boxes.iter().any(|b| {
            let lo = |a: usize| (b.lo[a] * period).to_integer();
            let hi = |a: usize| (b.hi[a] * period).to_integer();
            let lateral = |v: i64, a: usize| (lo(a) <= v && v <= hi(a)) || (lo(a) <= v + period && v + period <= hi(a));
            lateral(x, 0) && lateral(y, 1) && lo(2) <= p[2] && p[2] <= hi(2)
        })
    }

    /// Exact volume of the box union (per unit cell).
    pub fn volume(&self) -> Rational {
        let m = self.resolution_unit();
        let mut count = 0i64;
        for k in -m..m {
            for j in 0..m {
                for i in 0..m {
                    if self.contains_doubled([2 * i + 1, 2 * j + 1, 2 * k + 1], m) {
                        count += 1;
                    }
                }
            }
        }
        Rational::new(count, m * m * m)
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// Vertical extent and lateral size of a computational domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DomainExtent {
    /// Number of layer periods along each lateral axis.
    pub periods: usize,
    /// Domain covers `-half_height <= x3 <= half_height`.
    pub half_height: Rational,
}

/// Voxelized layer `L^delta` on a staggered lattice.
#[derive(Clone, Debug)]
pub struct LayerGeometry {
    pub delta: Rational,
    pub spacing: Rational,
    pub obstacle: CanonicalObstacle,
    pub lattice: YeeLattice,
    pub cells_per_period: usize,
    pub periods: usize,
    /// Solid voxels, indexed by [`YeeLattice::cell`].
    pub pec_mask: Vec<bool>,
    /// Edges on `Gamma^delta` or inside the layer, indexed by [`YeeLattice::edge`].
    pub edge_pec_mask: Vec<bool>,
}

/// Checks that `spacing` divides `delta / 8` and returns the number of
/// grid cells per period.
pub fn cells_per_period(delta: Rational, spacing: Rational) -> Result<usize> {
    let misaligned = || Error::SpacingMisaligned {
        spacing: spacing.to_string(),
        eighth: (delta / 8).to_string(),
    };
    if spacing <= r(0, 1) || delta <= r(0, 1) {
        return Err(misaligned());
    }
    let q = delta / (spacing * 8);
    if !q.is_integer() {
        return Err(misaligned());
    }
    Ok(8 * q.to_integer() as usize)
}

/// Voxelizes the layer on a one-period domain spanning the slab
/// `|x3| <= delta/2`.
pub fn voxelize_layer(obstacle: &CanonicalObstacle, delta: Rational, spacing: Rational) -> Result<LayerGeometry> {
    voxelize_layer_in(
        obstacle,
        delta,
        spacing,
        DomainExtent {
            periods: 1,
            half_height: delta / 2,
        },
    )
}

pub fn voxelize_layer_in(
    obstacle: &CanonicalObstacle,
    delta: Rational,
    spacing: Rational,
    extent: DomainExtent,
) -> Result<LayerGeometry> {
    let m = cells_per_period(delta, spacing)?;
    if (m as i64) % obstacle.resolution_unit() != 0 {
        return Err(Error::SpacingMisaligned {
            spacing: spacing.to_string(),
            eighth: (delta / 8).to_string(),
        });
    }
    let half = extent.half_height / spacing;
    if !half.is_integer() || half.to_integer() <= 0 {
        return Err(Error::InvalidGrid(format!(
            "half height {} is not a positive multiple of the spacing {}",
            extent.half_height, spacing
        )));
    }
    if extent.periods == 0 {
        return Err(Error::InvalidGrid("at least one period is required".into()));
    }
    let n_lat = m * extent.periods;
    let lattice = YeeLattice::new(n_lat, n_lat, 2 * half.to_integer() as usize);
    let mi = m as i64;
    let k0 = lattice.mid_layer() as i64;

    let mut pec_mask = vec![false; lattice.n_cells()];
    for k in 0..lattice.nz {
        for j in 0..lattice.ny {
            for i in 0..lattice.nx {
                let p = [2 * i as i64 + 1, 2 * j as i64 + 1, 2 * (k as i64 - k0) + 1];
                pec_mask[lattice.cell(i, j, k)] = obstacle.contains_doubled(p, mi);
            }
        }
    }
    let mut edge_pec_mask = vec![false; lattice.n_edges()];
    for (e, flag) in edge_pec_mask.iter_mut().enumerate() {
        let (a, i, j, k) = lattice.edge_coords(e);
        *flag = obstacle.contains_doubled(lattice.edge_doubled(a, i, j, k), mi);
    }
    Ok(LayerGeometry {
        delta,
        spacing,
        obstacle: obstacle.clone(),
        lattice,
        cells_per_period: m,
        periods: extent.periods,
        pec_mask,
        edge_pec_mask,
    })
}

impl LayerGeometry {
    pub fn solid_voxels(&self) -> usize {
        self.pec_mask.iter().filter(|&&b| b).count()
    }

    /// Rolls the layer laterally by whole cells.
    pub fn translated(&self, di: usize, dj: usize) -> LayerGeometry {
        let lat = self.lattice;
        let mut out = self.clone();
        for k in 0..lat.nz {
            for j in 0..lat.ny {
                for i in 0..lat.nx {
                    out.pec_mask[lat.cell((i + di) % lat.nx, (j + dj) % lat.ny, k)] = self.pec_mask[lat.cell(i, j, k)];
                }
            }
        }
        for e in 0..lat.n_edges() {
            let (a, i, j, k) = lat.edge_coords(e);
            out.edge_pec_mask[lat.edge(a, (i + di) % lat.nx, (j + dj) % lat.ny, k)] = self.edge_pec_mask[e];
        }
        out
    }
}

/// Rectangle in the plane `y3 = 0`, given for the representative cut with
/// label `(0, 0)`. An unbounded axis covers the whole line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CutRect {
    pub lo: [Rational; 2],
    pub hi: [Rational; 2],
    pub unbounded: [bool; 2],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutKind {
    /// One strip per period along `e2`, labelled by `j`.
    Strips,
    /// One square hole per cell, labelled by `(i, j)`.
    Holes,
}

/// Cuts `Sigma` that make the strip domain minus the cuts split into two
/// simply connected halves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CutSet {
    pub kind: CutKind,
    pub representative: CutRect,
    /// Lateral directions (1 or 2) whose jump data these cuts carry.
    pub jump_directions: Vec<usize>,
}

impl CutSet {
    /// Lattice label `(i, j)` of the cut containing the lateral point, if
    /// any. For strips the first label is always 0.
    pub fn label_at(&self, y: [f64; 2]) -> Option<(i64, i64)> {
        let mut label = [0i64; 2];
        for a in 0..2 {
            if self.representative.unbounded[a] {
                continue;
            }
            let lo = to_f64(self.representative.lo[a]);
            let hi = to_f64(self.representative.hi[a]);
            let n = (y[a] - 0.5 * (lo + hi)).round();
            let local = y[a] - n;
            if local <= lo || local >= hi {
                return None;
            }
            label[a] = n as i64;
        }
        Some((label[0], label[1]))
    }

    pub fn supports(&self, direction: usize) -> bool {
        self.jump_directions.contains(&direction)
    }
}

pub fn to_f64(v: Rational) -> f64 {
    *v.numer() as f64 / *v.denom() as f64
}

/// Winding data for one connected component of the periodic obstacle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentWinding {
    pub id: usize,
    /// Basis of the lattice of periods the component wraps around;
    /// `[(0, 0)]` for a component that closes up inside one cell.
    pub windings: Vec<(i64, i64)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopologyCertificate {
    pub components: Vec<ComponentWinding>,
    pub constructible_p1: bool,
    pub constructible_p2: bool,
    pub cuts_required: Option<CutSet>,
}

impl TopologyCertificate {
    pub fn constructible(&self, direction: usize) -> bool {
        match direction {
            1 => self.constructible_p1,
            2 => self.constructible_p2,
            _ => false,
        }
    }

    /// Whether the Neumann potential along `direction` splits into one-sided
    /// cut potentials. This happens when a wire runs along the other
    /// lateral direction.
    pub fn needs_cut(&self, direction: usize) -> bool {
        match direction {
            1 => !self.constructible_p2,
            2 => !self.constructible_p1,
            _ => false,
        }
    }
}

/// Reference resolution used for certificates.
pub const CERTIFICATE_RESOLUTION: i64 = 8;

pub fn topology_certificate(obstacle: &CanonicalObstacle) -> TopologyCertificate {
    topology_certificate_at(obstacle, CERTIFICATE_RESOLUTION.max(obstacle.resolution_unit()))
}

/// Traces the connected components of the voxelized obstacle on the torus
/// and records, for each component, the net period-face crossings of every
/// closed loop found during the traversal.
pub fn topology_certificate_at(obstacle: &CanonicalObstacle, m: i64) -> TopologyCertificate {
    assert!(m % obstacle.resolution_unit() == 0, "resolution must resolve the obstacle");
    let mu = m as usize;
    let layers = mu; // y3 in [-1/2, 1/2]
    let idx = |i: usize, j: usize, k: usize| i + mu * (j + mu * k);
    let mut solid = vec![false; mu * mu * layers];
    for k in 0..layers {
        for j in 0..mu {
            for i in 0..mu {
                let z = 2 * (k as i64 - m / 2) + 1;
                solid[idx(i, j, k)] = obstacle.contains_doubled([2 * i as i64 + 1, 2 * j as i64 + 1, z], m);
            }
        }
    }

    let mut lift: Vec<Option<(usize, [i64; 2])>> = vec![None; solid.len()];
    let mut components = Vec::new();
    for start in 0..solid.len() {
        if !solid[start] || lift[start].is_some() {
            continue;
        }
        let id = components.len();
        let mut gens = Vec::new();
        let mut queue = VecDeque::new();
        lift[start] = Some((id, [0, 0]));
        queue.push_back(start);
        while let Some(c) = queue.pop_front() {
            let (i, j, k) = (c % mu, (c / mu) % mu, c / (mu * mu));
            let here = lift[c].unwrap().1;
            let mut neighbours: Vec<(usize, [i64; 2])> = Vec::with_capacity(6);
            let step = |v: usize, d: i64| -> (usize, i64) {
                let w = v as i64 + d;
                (w.rem_euclid(m) as usize, w.div_euclid(m))
            };
            for d in [-1i64, 1] {
                let (ni, wi) = step(i, d);
                neighbours.push((idx(ni, j, k), [here[0] + wi, here[1]]));
                let (nj, wj) = step(j, d);
                neighbours.push((idx(i, nj, k), [here[0], here[1] + wj]));
                let nk = k as i64 + d;
                if (0..layers as i64).contains(&nk) {
                    neighbours.push((idx(i, j, nk as usize), here));
                }
            }
            for (n, l) in neighbours {
                if !solid[n] {
                    continue;
                }
                match lift[n] {
                    None => {
                        lift[n] = Some((id, l));
                        queue.push_back(n);
                    }
                    Some((_, seen)) => {
                        let g = [l[0] - seen[0], l[1] - seen[1]];
                        if g != [0, 0] {
                            gens.push(g);
                        }
                    }
                }
            }
        }
        let mut windings = lattice_basis(&gens);
        if windings.is_empty() {
            windings.push((0, 0));
        }
        components.push(ComponentWinding { id, windings });
    }

    let wraps = |axis: usize| {
        components
            .iter()
            .any(|c| c.windings.iter().any(|w| if axis == 0 { w.0 != 0 } else { w.1 != 0 }))
    };
    let constructible_p1 = !wraps(0);
    let constructible_p2 = !wraps(1);
    let cuts_required = if constructible_p1 && constructible_p2 {
        None
    } else {
        derive_cuts(obstacle, constructible_p1, constructible_p2)
    };
    TopologyCertificate {
        components,
        constructible_p1,
        constructible_p2,
        cuts_required,
    }
}

/// Lateral interval `[lo, hi]` covered by a box that spans the whole
/// period along `along` and meets the plane `y3 = 0`.
fn wire_interval(obstacle: &CanonicalObstacle, along: usize) -> Option<(Rational, Rational)> {
    let across = 1 - along;
    obstacle
        .boxes
        .iter()
        .find(|b| b.spans_full_period(along) && b.lo[2] < r(0, 1) && b.hi[2] > r(0, 1))
        .map(|b| (b.lo[across], b.hi[across]))
}

fn derive_cuts(obstacle: &CanonicalObstacle, p1: bool, p2: bool) -> Option<CutSet> {
    // complement of [lo, hi] in one period, centred on the lattice point 0
    let gap = |(lo, hi): (Rational, Rational)| (hi - r(1, 1), lo);
    match (p1, p2) {
        (false, true) => {
            let (lo, hi) = gap(wire_interval(obstacle, 0)?);
            if lo >= hi {
                return None;
            }
            Some(CutSet {
                kind: CutKind::Strips,
                representative: CutRect {
                    lo: [r(0, 1), lo],
                    hi: [r(1, 1), hi],
                    unbounded: [true, false],
                },
                jump_directions: vec![2],
            })
        }
        (false, false) => {
            let (lo2, hi2) = gap(wire_interval(obstacle, 0)?);
            let (lo1, hi1) = gap(wire_interval(obstacle, 1)?);
            if lo1 >= hi1 || lo2 >= hi2 {
                return None;
            }
            Some(CutSet {
                kind: CutKind::Holes,
                representative: CutRect {
                    lo: [lo1, lo2],
                    hi: [hi1, hi2],
                    unbounded: [false, false],
                },
                jump_directions: vec![1, 2],
            })
        }
        // a wire along e2 alone would need strips along e2; not one of the canonical cases
        _ => None,
    }
}

/// Hermite-style basis of the integer lattice spanned by `gens`.
fn lattice_basis(gens: &[[i64; 2]]) -> Vec<(i64, i64)> {
    let mut pivot: Option<[i64; 2]> = None;
    let mut second = 0i64;
    for &v in gens {
        if v[0] == 0 {
            second = gcd(second, v[1]);
            continue;
        }
        match pivot {
            None => pivot = Some(v),
            Some(p) => {
                let (mut a, mut b) = (p, v);
                while b[0] != 0 {
                    let q = a[0].div_euclid(b[0]);
                    a = [a[0] - q * b[0], a[1] - q * b[1]];
                    std::mem::swap(&mut a, &mut b);
                }
                second = gcd(second, b[1]);
                pivot = Some(a);
            }
        }
    }
    let mut basis = Vec::new();
    if let Some(mut p) = pivot {
        if p[0] < 0 {
            p = [-p[0], -p[1]];
        }
        if second != 0 {
            p[1] = p[1].rem_euclid(second);
        }
        basis.push((p[0], p[1]));
    }
    if second != 0 {
        basis.push((0, second));
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_is_two_by_two_column() {
        let ob = build_canonical_obstacle(CaseId::ParallelWires);
        let layer = voxelize_layer(&ob, r(1, 8), r(1, 64)).unwrap();
        assert_eq!(layer.cells_per_period, 8);
        assert_eq!(layer.lattice.nz, 8);
        // every x-column of the period holds the same 2x2 cross-section
        for i in 0..8 {
            let mut count = 0;
            for k in 0..8 {
                for j in 0..8 {
                    if layer.pec_mask[layer.lattice.cell(i, j, k)] {
                        assert!((3..5).contains(&j) && (3..5).contains(&k));
                        count += 1;
                    }
                }
            }
            assert_eq!(count, 4);
        }
    }

    #[test]
    fn cross_overlap_is_two_cubed() {
        let ob = build_canonical_obstacle(CaseId::WireMesh);
        let layer = voxelize_layer(&ob, r(1, 8), r(1, 64)).unwrap();
        // two columns of 8*4 voxels minus the shared 2x2x2 block
        assert_eq!(layer.solid_voxels(), 2 * 32 - 8);
    }

    #[test]
    fn misaligned_spacing_is_rejected() {
        let ob = build_canonical_obstacle(CaseId::ParallelWires);
        let err = voxelize_layer(&ob, r(1, 8), r(1, 24)).unwrap_err();
        assert!(matches!(err, Error::SpacingMisaligned { .. }));
    }

    #[test]
    fn cube_sits_inside_open_cell() {
        let ob = build_canonical_obstacle(CaseId::DiscreteObstacle);
        assert_eq!(ob.boxes().len(), 1);
        let b = ob.boxes()[0];
        assert!(b.lo[0] > r(0, 1) && b.hi[0] < r(1, 1));
        assert!(b.lo[2] > r(-1, 2) && b.hi[2] < r(1, 2));
        assert_eq!(ob.volume(), r(1, 8));
    }

    #[test]
    fn certificates_for_canonical_cases() {
        let c1 = topology_certificate(&build_canonical_obstacle(CaseId::DiscreteObstacle));
        assert_eq!(c1.components.len(), 1);
        assert_eq!(c1.components[0].windings, vec![(0, 0)]);
        assert!(c1.constructible_p1 && c1.constructible_p2);
        assert!(c1.cuts_required.is_none());

        let c2 = topology_certificate(&build_canonical_obstacle(CaseId::ParallelWires));
        assert_eq!(c2.components[0].windings, vec![(1, 0)]);
        assert!(!c2.constructible_p1 && c2.constructible_p2);
        let cuts = c2.cuts_required.unwrap();
        assert_eq!(cuts.kind, CutKind::Strips);
        assert_eq!(cuts.representative.lo[1], r(-3, 8));
        assert_eq!(cuts.representative.hi[1], r(3, 8));

        let c3 = topology_certificate(&build_canonical_obstacle(CaseId::WireMesh));
        assert_eq!(c3.components.len(), 1);
        assert_eq!(c3.components[0].windings, vec![(1, 0), (0, 1)]);
        assert!(!c3.constructible_p1 && !c3.constructible_p2);
        let cuts = c3.cuts_required.unwrap();
        assert_eq!(cuts.kind, CutKind::Holes);
        assert_eq!(cuts.representative.lo, [r(-3, 8), r(-3, 8)]);
    }

    #[test]
    fn cut_labels() {
        let c3 = topology_certificate(&build_canonical_obstacle(CaseId::WireMesh));
        let cuts = c3.cuts_required.unwrap();
        assert_eq!(cuts.label_at([0.1, 0.9]), Some((0, 1)));
        assert_eq!(cuts.label_at([0.5, 0.1]), None);
        let c2 = topology_certificate(&build_canonical_obstacle(CaseId::ParallelWires));
        let strips = c2.cuts_required.unwrap();
        assert_eq!(strips.label_at([0.5, 0.7]), Some((0, 1)));
        assert_eq!(strips.label_at([0.5, 0.5]), None);
    }

    #[test]
    fn lattice_basis_reduces() {
        assert_eq!(lattice_basis(&[[2, 0], [3, 0]]), vec![(1, 0)]);
        assert_eq!(lattice_basis(&[[1, 1], [0, 2], [1, -1]]), vec![(1, 1), (0, 2)]);
        assert!(lattice_basis(&[]).is_empty());
    }

    #[test]
    fn full_slab_wraps_both_ways() {
        let cert = topology_certificate(&CanonicalObstacle::full_slab(r(1, 8)));
        assert!(!cert.constructible_p1 && !cert.constructible_p2);
        assert!(cert.cuts_required.is_none());
    }
}
