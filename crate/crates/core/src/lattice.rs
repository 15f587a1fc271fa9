//! Index bookkeeping for the staggered (Yee) lattice used by the Maxwell
//! solvers.
//!
//! The lattice has `nx * ny` cells laterally (periodic) and `nz` cells
//! vertically (bounded). Node `(i, j, k)` sits at `(i h, j h, (k - nz/2) h)`.
//!
//! * edges along axis 0 live at `(i + 1/2, j, k)` for `k in 0..=nz`
//! * edges along axis 1 live at `(i, j + 1/2, k)` for `k in 0..=nz`
//! * edges along axis 2 live at `(i, j, k + 1/2)` for `k in 0..nz`
//!
//! Faces are indexed by their normal axis: face 0 at `(i, j+1/2, k+1/2)`,
//! face 1 at `(i+1/2, j, k+1/2)` (both `k in 0..nz`) and face 2 at
//! `(i+1/2, j+1/2, k)` with `k in 0..=nz`.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YeeLattice {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl YeeLattice {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Self {
        assert!(nx > 0 && ny > 0 && nz > 0 && nz.is_multiple_of(2));
        YeeLattice { nx, ny, nz }
    }

    /// Node layer of the plane `x3 = 0`.
    pub fn mid_layer(&self) -> usize {
        self.nz / 2
    }

    fn layers(&self, axis: usize) -> usize {
        if axis == 2 {
            self.nz
        } else {
            self.nz + 1
        }
    }

    pub fn edges_on_axis(&self, axis: usize) -> usize {
        self.nx * self.ny * self.layers(axis)
    }

    pub fn edge_offset(&self, axis: usize) -> usize {
        (0..axis).map(|a| self.edges_on_axis(a)).sum()
    }

    pub fn n_edges(&self) -> usize {
        self.edge_offset(3)
    }

    #[inline]
    pub fn edge(&self, axis: usize, i: usize, j: usize, k: usize) -> usize {
        self.edge_offset(axis) + i + self.nx * (j + self.ny * k)
    }

    /// Inverse of [`YeeLattice::edge`].
    pub fn edge_coords(&self, e: usize) -> (usize, usize, usize, usize) {
        let mut axis = 0;
        let mut local = e;
        while local >= self.edges_on_axis(axis) {
            local -= self.edges_on_axis(axis);
            axis += 1;
        }
        let i = local % self.nx;
        let j = (local / self.nx) % self.ny;
        let k = local / (self.nx * self.ny);
        (axis, i, j, k)
    }

    /// Edge midpoint in doubled units (half cells), vertical coordinate
    /// measured from the plane `x3 = 0`.
    pub fn edge_doubled(&self, axis: usize, i: usize, j: usize, k: usize) -> [i64; 3] {
        let mut p = [2 * i as i64, 2 * j as i64, 2 * (k as i64 - self.mid_layer() as i64)];
        p[axis] += 1;
        p
    }

    pub fn faces_on_axis(&self, axis: usize) -> usize {
        let layers = if axis == 2 { self.nz + 1 } else { self.nz };
        self.nx * self.ny * layers
    }

    pub fn face_offset(&self, axis: usize) -> usize {
        (0..axis).map(|a| self.faces_on_axis(a)).sum()
    }

    pub fn n_faces(&self) -> usize {
        self.face_offset(3)
    }

    #[inline]
    pub fn face(&self, axis: usize, i: usize, j: usize, k: usize) -> usize {
        self.face_offset(axis) + i + self.nx * (j + self.ny * k)
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize, k: usize) -> usize {
        i + self.nx * (j + self.ny * k)
    }

    #[inline]
    pub fn xp(&self, i: usize) -> usize {
        (i + 1) % self.nx
    }

    #[inline]
    pub fn yp(&self, j: usize) -> usize {
        (j + 1) % self.ny
    }

    #[inline]
    pub fn xm(&self, i: usize) -> usize {
        (i + self.nx - 1) % self.nx
    }

    #[inline]
    pub fn ym(&self, j: usize) -> usize {
        (j + self.ny - 1) % self.ny
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_index_roundtrip() {
        let lat = YeeLattice::new(3, 4, 6);
        for e in 0..lat.n_edges() {
            let (a, i, j, k) = lat.edge_coords(e);
            assert_eq!(lat.edge(a, i, j, k), e);
        }
        assert_eq!(lat.n_edges(), 3 * 4 * 7 * 2 + 3 * 4 * 6);
    }
}
