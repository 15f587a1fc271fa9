//! Frequency-domain Maxwell solver on a staggered (Yee) lattice.
//!
//! Discretizes `curl curl E - omega^2 eps E = f` with `E` on edges and
//! `curl E` on faces. The lattice is periodic in `x1`, `x2`; tangential `E`
//! vanishes on the truncation planes `x3 = +-X3` and on every edge of the
//! conducting layer. Absorption comes entirely from `Im eps > 0`.

use num_complex::Complex64;
use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::geometry::{cells_per_period, to_f64, voxelize_layer_in, CaseId, DomainExtent, LayerGeometry, Rational};
use crate::lattice::YeeLattice;
use crate::linalg::{bicgstab, dense_solve, Csr, CsrBuilder, KrylovOptions, SolveStats};

/// Unknown count up to which [`Backend::Auto`] uses the dense LU solve.
pub const DENSE_LIMIT: usize = 3_000;

pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    /// Uniform surface current on the plane `x3 = a`.
    CurrentSheet,
    /// Point current on the single edge at the lateral centre of the plane
    /// `x3 = a`.
    Dipole,
}

/// Lateral unit vector; `E1` / `E2` are the coordinate directions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polarization(pub [f64; 2]);

impl Polarization {
    pub const E1: Polarization = Polarization([1.0, 0.0]);
    pub const E2: Polarization = Polarization([0.0, 1.0]);

    pub fn new(v: [f64; 2]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(Error::schema("source.pol", format!("polarization must be a unit vector, got {v:?}")));
        }
        Ok(Polarization(v))
    }

    /// `"e1"` / `"e2"` for the coordinate directions.
    pub fn name(&self) -> String {
        if *self == Polarization::E1 {
            "e1".into()
        } else if *self == Polarization::E2 {
            "e2".into()
        } else {
            format!("({},{})", self.0[0], self.0[1])
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SourceSpec {
    pub kind: SourceKind,
    /// Height of the source plane.
    pub a: Rational,
    pub polarization: Polarization,
    pub amplitude: Complex64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationConfig {
    pub omega: f64,
    pub epsilon: Complex64,
    pub delta: Rational,
    /// `None` runs without a layer.
    pub case: Option<CaseId>,
    pub x3: Rational,
    pub spacing: Rational,
    pub source: SourceSpec,
    pub tolerance: f64,
    /// Layer periods across the lateral domain.
    pub periods: usize,
    /// Height of the measurement planes `x3 = +-d`.
    pub d: Rational,
}

fn q(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

impl SimulationConfig {
    /// `omega = 2 pi`, `eps = 1 + i`, current sheet polarized along `e1` at
    /// `a = d = 5/16`, `X3 = 21/4`, spacing `delta/8`.
    pub fn new(case: Option<CaseId>, delta: Rational) -> Self {
        SimulationConfig {
            omega: 2.0 * std::f64::consts::PI,
            epsilon: Complex64::new(1.0, 1.0),
            delta,
            case,
            x3: q(21, 4),
            spacing: delta / 8,
            source: SourceSpec {
                kind: SourceKind::CurrentSheet,
                a: q(5, 16),
                polarization: Polarization::E1,
                amplitude: Complex64::new(1.0, 0.0),
            },
            tolerance: 1e-8,
            periods: 1,
            d: q(5, 16),
        }
    }

    pub fn wavenumber(&self) -> Complex64 {
        self.omega * self.epsilon.sqrt()
    }

    pub fn h(&self) -> f64 {
        to_f64(self.spacing)
    }

    /// Checks every invariant of the configuration.
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.re > 0.0 && self.epsilon.im > 0.0) {
            return Err(Error::InvalidEpsilon {
                re: self.epsilon.re,
                im: self.epsilon.im,
            });
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::schema("omega", "must be positive"));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::schema("tol", "must lie in (0, 1)"));
        }
        if self.periods == 0 {
            return Err(Error::schema("periods", "must be at least 1"));
        }
        if self.delta <= q(0, 1) {
            return Err(Error::schema("delta", "must be positive"));
        }
        if self.spacing <= q(0, 1) {
            return Err(Error::schema("spacing", "must be positive"));
        }
        self.lattice()?;
        let on_grid = |v: Rational| (v / self.spacing).is_integer();
        let a = self.source.a;
        if !on_grid(a) {
            return Err(Error::schema("source.a", "must be a multiple of the spacing"));
        }
        if a >= self.x3 || -a >= self.x3 {
            return Err(Error::schema("source.a", "must lie strictly inside the domain"));
        }
        if self.case.is_some() && a <= self.delta / 2 && -a <= self.delta / 2 {
            return Err(Error::schema("source.a", "source must not touch the layer |x3| <= delta/2"));
        }
        let pol = self.source.polarization;
        Polarization::new(pol.0)?;
        if self.source.kind == SourceKind::Dipole && pol != Polarization::E1 && pol != Polarization::E2 {
            return Err(Error::schema("source.pol", "dipoles point along e1 or e2"));
        }
        if !on_grid(self.d) || self.d <= q(0, 1) {
            return Err(Error::schema("d", "must be a positive multiple of the spacing"));
        }
        Ok(())
    }

    /// Grid cells per layer period.
    pub fn cells_per_period(&self) -> Result<usize> {
        match self.case {
            Some(_) => cells_per_period(self.delta, self.spacing),
            None => {
                let r = self.delta / self.spacing;
                if r.is_integer() {
                    Ok(r.to_integer() as usize)
                } else {
                    Err(Error::SpacingMisaligned {
                        spacing: self.spacing.to_string(),
                        eighth: (self.delta / 8).to_string(),
                    })
                }
            }
        }
    }

    pub fn lattice(&self) -> Result<YeeLattice> {
        let m = self.cells_per_period()?;
        let half = self.x3 / self.spacing;
        if !half.is_integer() || half.to_integer() <= 0 {
            return Err(Error::schema("X3", "must be a positive multiple of the spacing"));
        }
        Ok(YeeLattice::new(m * self.periods, m * self.periods, 2 * half.to_integer() as usize))
    }

    /// Voxelized layer on the full computational domain, if a case is set.
    pub fn layer(&self) -> Result<Option<LayerGeometry>> {
        match self.case {
            None => Ok(None),
            Some(case) => voxelize_layer_in(
                &crate::geometry::build_canonical_obstacle(case),
                self.delta,
                self.spacing,
                DomainExtent {
                    periods: self.periods,
                    half_height: self.x3,
                },
            )
            .map(Some),
        }
    }

    /// Node layer of the plane `x3 = z` (must be on the grid).
    pub fn layer_index(&self, z: Rational) -> Result<usize> {
        let lat = self.lattice()?;
        let steps = z / self.spacing;
        let k = lat.mid_layer() as i64 + steps.to_integer();
        if !steps.is_integer() || k < 0 || k > lat.nz as i64 {
            return Err(Error::PlaneOutOfRange {
                plane: to_f64(z),
                reason: "not a node plane of the grid".into(),
            });
        }
        Ok(k as usize)
    }
}

/// How the curl-curl system is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Dense LU up to [`DENSE_LIMIT`] unknowns, BiCGStab beyond.
    Auto,
    Krylov,
    Dense,
}

/// Curl-curl operator restricted to the free edges.
pub struct MaxwellSystem {
    pub lattice: YeeLattice,
    pub h: f64,
    /// `curl`, faces x edges, entries `+-1/h`.
    pub curl: Csr<f64>,
    /// Unknown index of every edge, `None` for constrained edges.
    pub unknown: Vec<Option<usize>>,
    pub edges: Vec<usize>,
    pub matrix: Csr<Complex64>,
}

pub fn curl_matrix(lat: &YeeLattice, h: f64) -> Csr<f64> {
    let c = 1.0 / h;
    let mut b = CsrBuilder::new(lat.n_edges());
    let (nx, ny, nz) = (lat.nx, lat.ny, lat.nz);
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                // (curl E)_1 = d2 E3 - d3 E2
                b.push(lat.edge(2, i, lat.yp(j), k), c);
                b.push(lat.edge(2, i, j, k), -c);
                b.push(lat.edge(1, i, j, k + 1), -c);
                b.push(lat.edge(1, i, j, k), c);
                b.finish_row();
            }
        }
    }
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                // (curl E)_2 = d3 E1 - d1 E3
                b.push(lat.edge(0, i, j, k + 1), c);
                b.push(lat.edge(0, i, j, k), -c);
                b.push(lat.edge(2, lat.xp(i), j, k), -c);
                b.push(lat.edge(2, i, j, k), c);
                b.finish_row();
            }
        }
    }
    for k in 0..=nz {
        for j in 0..ny {
            for i in 0..nx {
                // (curl E)_3 = d1 E2 - d2 E1
                b.push(lat.edge(1, lat.xp(i), j, k), c);
                b.push(lat.edge(1, i, j, k), -c);
                b.push(lat.edge(0, i, lat.yp(j), k), -c);
                b.push(lat.edge(0, i, j, k), c);
                b.finish_row();
            }
        }
    }
    b.build()
}

/// Edges whose field is fixed to zero: tangential edges on the truncation
/// planes, plus the edges of `extra`.
pub fn truncation_mask(lat: &YeeLattice) -> Vec<bool> {
    let mut mask = vec![false; lat.n_edges()];
    for axis in 0..2 {
        for k in [0, lat.nz] {
            for j in 0..lat.ny {
                for i in 0..lat.nx {
                    mask[lat.edge(axis, i, j, k)] = true;
                }
            }
        }
    }
    mask
}

impl MaxwellSystem {
    pub fn assemble(lat: YeeLattice, h: f64, omega: f64, epsilon: Complex64, blocked: &[bool]) -> Self {
        let curl = curl_matrix(&lat, h);
        let curl_t = curl.transpose();
        let mut unknown = vec![None; lat.n_edges()];
        let mut edges = Vec::new();
        for (e, u) in unknown.iter_mut().enumerate() {
            if !blocked[e] {
                *u = Some(edges.len());
                edges.push(e);
            }
        }
        let shift = Complex64::new(omega * omega, 0.0) * epsilon;
        let mut b = CsrBuilder::new(edges.len());
        for (u, &e) in edges.iter().enumerate() {
            for (f, cf) in curl_t.row(e) {
                for (e2, c2) in curl.row(f) {
                    if let Some(u2) = unknown[e2] {
                        b.push(u2, Complex64::new(cf * c2, 0.0));
                    }
                }
            }
            b.push(u, -shift);
            b.finish_row();
        }
        MaxwellSystem {
            lattice: lat,
            h,
            curl,
            unknown,
            edges,
            matrix: b.build(),
        }
    }

    pub fn unknowns(&self) -> usize {
        self.edges.len()
    }

    pub fn restrict(&self, full: &[Complex64]) -> Vec<Complex64> {
        self.edges.iter().map(|&e| full[e]).collect()
    }

    pub fn extend(&self, reduced: &[Complex64]) -> Vec<Complex64> {
        let mut full = vec![Complex64::new(0.0, 0.0); self.lattice.n_edges()];
        for (u, &e) in self.edges.iter().enumerate() {
            full[e] = reduced[u];
        }
        full
    }

    pub fn solve(&self, rhs: &[Complex64], backend: Backend, tolerance: f64) -> Result<(Vec<Complex64>, SolveStats)> {
        let dense = match backend {
            Backend::Dense => true,
            Backend::Krylov => false,
            Backend::Auto => self.unknowns() <= DENSE_LIMIT,
        };
        if dense {
            if self.unknowns() > DENSE_LIMIT {
                return Err(Error::AbortOnBudget {
                    unknowns: self.unknowns(),
                    cap: DENSE_LIMIT,
                });
            }
            let x = dense_solve(&self.matrix, rhs)?;
            let residual = crate::linalg::relative_residual(&self.matrix, rhs, &x);
            return Ok((
                x,
                SolveStats {
                    iterations: 0,
                    relative_residual: residual,
                },
            ));
        }
        let mut x = vec![Complex64::new(0.0, 0.0); rhs.len()];
        let stats = bicgstab(
            &self.matrix,
            rhs,
            &mut x,
            KrylovOptions {
                tolerance,
                max_iterations: DEFAULT_MAX_ITERATIONS,
            },
        )?;
        Ok((x, stats))
    }
}

/// Source current on every edge of the lattice.
pub fn source_vector(config: &SimulationConfig, lat: &YeeLattice) -> Result<Vec<Complex64>> {
    let h = config.h();
    let k = config.layer_index(config.source.a)?;
    let mut f = vec![Complex64::new(0.0, 0.0); lat.n_edges()];
    let s = config.source;
    match s.kind {
        SourceKind::CurrentSheet => {
            for axis in 0..2 {
                let value = s.amplitude * s.polarization.0[axis] / h;
                if value.norm() == 0.0 {
                    continue;
                }
                for j in 0..lat.ny {
                    for i in 0..lat.nx {
                        f[lat.edge(axis, i, j, k)] = value;
                    }
                }
            }
        }
        SourceKind::Dipole => {
            let axis = if s.polarization == Polarization::E1 { 0 } else { 1 };
            f[lat.edge(axis, lat.nx / 2, lat.ny / 2, k)] = s.amplitude / (h * h * h);
        }
    }
    Ok(f)
}

/// Solved field with its derived magnetic field.
#[derive(Clone, Debug)]
pub struct EMField {
    pub lattice: YeeLattice,
    pub h: f64,
    pub omega: f64,
    pub epsilon: Complex64,
    /// Electric field on edges.
    pub e: Vec<Complex64>,
    /// `H = curl E / (i omega)` on faces.
    pub hfield: Vec<Complex64>,
    /// Source current on edges.
    pub f: Vec<Complex64>,
    /// Edges constrained to zero (layer, truncation planes, interface).
    pub blocked: Vec<bool>,
    pub stats: SolveStats,
    /// Relative residuals of the first-order system.
    pub residuals: (f64, f64),
}

impl EMField {
    /// Lateral mean of the field along `pol` on node layer `k`.
    pub fn lateral_mean(&self, k: usize, pol: Polarization) -> Complex64 {
        let lat = &self.lattice;
        let mut acc = Complex64::new(0.0, 0.0);
        for axis in 0..2 {
            if pol.0[axis] == 0.0 {
                continue;
            }
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..lat.ny {
                for i in 0..lat.nx {
                    s += self.e[lat.edge(axis, i, j, k)];
                }
            }
            acc += s * pol.0[axis] / (lat.nx * lat.ny) as f64;
        }
        acc
    }

    /// Largest `|E|` on the constrained edges.
    pub fn constrained_max(&self) -> f64 {
        self.e
            .iter()
            .zip(&self.blocked)
            .filter(|(_, &b)| b)
            .map(|(v, _)| v.norm())
            .fold(0.0, f64::max)
    }

    /// `sqrt(|E|^2 + |curl E|^2)` integrated over the domain, per unit
    /// lateral area.
    pub fn graph_norm(&self) -> f64 {
        let lat = &self.lattice;
        let vol = self.h.powi(3);
        let curl2: f64 = self.hfield.iter().map(|v| (v * self.omega).norm_sqr()).sum();
        let e2: f64 = self.e.iter().map(|v| v.norm_sqr()).sum();
        let area = (lat.nx as f64 * self.h) * (lat.ny as f64 * self.h);
        ((e2 + curl2) * vol / area).sqrt()
    }
}

/// Solves with the given constrained edges (PEC and interface edges; the
/// truncation planes are always added).
pub fn solve_constrained(config: &SimulationConfig, extra_blocked: &[bool], backend: Backend) -> Result<EMField> {
    config.validate()?;
    let lat = config.lattice()?;
    let mut blocked = truncation_mask(&lat);
    for (b, &x) in blocked.iter_mut().zip(extra_blocked) {
        *b |= x;
    }
    let system = MaxwellSystem::assemble(lat, config.h(), config.omega, config.epsilon, &blocked);
    let f = source_vector(config, &lat)?;
    let rhs = system.restrict(&f);
    let (x, stats) = system.solve(&rhs, backend, config.tolerance)?;
    let e = system.extend(&x);
    Ok(finish_field(config, &system, e, f, blocked, stats))
}

fn finish_field(
    config: &SimulationConfig,
    system: &MaxwellSystem,
    e: Vec<Complex64>,
    f: Vec<Complex64>,
    blocked: Vec<bool>,
    stats: SolveStats,
) -> EMField {
    let i_omega = Complex64::new(0.0, config.omega);
    let hfield: Vec<Complex64> = curl_apply(&system.curl, &e).into_iter().map(|v| v / i_omega).collect();
    let mut field = EMField {
        lattice: system.lattice,
        h: system.h,
        omega: config.omega,
        epsilon: config.epsilon,
        e,
        hfield,
        f,
        blocked,
        stats,
        residuals: (0.0, 0.0),
    };
    field.residuals = first_order_residuals(&field, &system.curl);
    field
}

fn curl_apply(curl: &Csr<f64>, e: &[Complex64]) -> Vec<Complex64> {
    (0..curl.nrows)
        .map(|f| curl.row(f).map(|(c, v)| e[c] * v).sum())
        .collect()
}

fn curl_transpose_apply(curl: &Csr<f64>, hf: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); curl.ncols];
    for (f, &hv) in hf.iter().enumerate().take(curl.nrows) {
        for (c, v) in curl.row(f) {
            out[c] += hv * v;
        }
    }
    out
}

fn norm(v: impl Iterator<Item = Complex64>) -> f64 {
    v.map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn first_order_residuals(field: &EMField, curl: &Csr<f64>) -> (f64, f64) {
    let i_omega = Complex64::new(0.0, field.omega);
    let ce = curl_apply(curl, &field.e);
    let r1 = norm(ce.iter().zip(&field.hfield).map(|(c, h)| -i_omega * h + c));
    let s1 = norm(ce.iter().copied());
    let cth = curl_transpose_apply(curl, &field.hfield);
    let free = |e: &usize| !field.blocked[*e];
    let r2 = norm(
        (0..field.e.len())
            .filter(free)
            .map(|e| -i_omega * field.epsilon * field.e[e] - cth[e] + field.f[e] / i_omega),
    );
    let s2 = norm((0..field.e.len()).filter(free).map(|e| field.f[e] / i_omega));
    let rel = |r: f64, s: f64| if s > 0.0 { r / s } else { r };
    (rel(r1, s1), rel(r2, s2))
}

/// Relative residuals of `-i omega H + curl E = 0` and
/// `-i omega eps E - curl^T H + f / (i omega) = 0`, the latter on the free
/// edges.
pub fn check_first_order_system(field: &EMField) -> (f64, f64) {
    let curl = curl_matrix(&field.lattice, field.h);
    first_order_residuals(field, &curl)
}

/// Resolved scattering problem with the voxelized layer (or none).
pub fn solve_scattering(config: &SimulationConfig, layer: Option<&LayerGeometry>) -> Result<EMField> {
    solve_scattering_with(config, layer, Backend::Krylov)
}

pub fn solve_scattering_with(config: &SimulationConfig, layer: Option<&LayerGeometry>, backend: Backend) -> Result<EMField> {
    config.validate()?;
    let lat = config.lattice()?;
    let blocked = match layer {
        None => vec![false; lat.n_edges()],
        Some(l) => {
            if l.lattice != lat {
                return Err(Error::InvalidGrid("layer was voxelized on a different lattice".into()));
            }
            l.edge_pec_mask.clone()
        }
    };
    solve_constrained(config, &blocked, backend)
}

/// Exact solution of the discrete one-dimensional problem without layer
/// for a current sheet of unit polarization: field along the polarization
/// on every node layer.
pub fn free_profile(config: &SimulationConfig) -> Result<Vec<Complex64>> {
    let lat = config.lattice()?;
    let nz = lat.nz;
    let h = config.h();
    let ka = config.layer_index(config.source.a)?;
    let k2 = Complex64::new(config.omega * config.omega, 0.0) * config.epsilon;
    // unknowns on layers 1..nz-1: -(u+ - 2u + u-)/h^2 - k^2 u = f
    let m = nz - 1;
    let off = Complex64::new(-1.0 / (h * h), 0.0);
    let diag = Complex64::new(2.0 / (h * h), 0.0) - k2;
    let mut rhs = vec![Complex64::new(0.0, 0.0); m];
    rhs[ka - 1] = config.source.amplitude / h;
    // Thomas algorithm
    let mut c = vec![Complex64::new(0.0, 0.0); m];
    let mut d = vec![Complex64::new(0.0, 0.0); m];
    c[0] = off / diag;
    d[0] = rhs[0] / diag;
    for i in 1..m {
        let den = diag - off * c[i - 1];
        c[i] = off / den;
        d[i] = (rhs[i] - off * d[i - 1]) / den;
    }
    let mut u = vec![Complex64::new(0.0, 0.0); nz + 1];
    u[m] = d[m - 1];
    for i in (0..m - 1).rev() {
        u[i + 1] = d[i] - c[i] * u[i + 2];
    }
    Ok(u)
}

/// Closed-form field of a current sheet in the unbounded lossy medium,
/// `i J / (2k) e^{ik|z - a|}`.
pub fn continuum_profile(config: &SimulationConfig, z: f64) -> Complex64 {
    let k = config.wavenumber();
    let a = to_f64(config.source.a);
    Complex64::new(0.0, 1.0) * config.source.amplitude / (2.0 * k) * (Complex64::new(0.0, 1.0) * k * (z - a).abs()).exp()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionReport {
    pub polarization: Polarization,
    /// Incident (layer-free) field at `x3 = -d`.
    pub incident: Complex64,
    /// `E(-d) / E_free(-d)`.
    pub transmitted: Complex64,
    /// `(E(+d) - E_free(+d)) / E_free(-d)`, i.e. the reflection coefficient
    /// referred to the plane `x3 = 0`.
    pub reflected: Complex64,
    pub shielding_ratio: f64,
}

/// Transmission and reflection at the planes `x3 = -+d`.
pub fn measure_transmission(field: &EMField, config: &SimulationConfig, d: Rational) -> Result<TransmissionReport> {
    if config.source.kind != SourceKind::CurrentSheet {
        return Err(Error::schema("source.type", "transmission is measured for current sheets only"));
    }
    let out_of_range = |reason: &str| Error::PlaneOutOfRange {
        plane: to_f64(d),
        reason: reason.into(),
    };
    if config.case.is_some() && d <= config.delta / 2 {
        return Err(out_of_range("planes must lie outside the layer, d > delta/2"));
    }
    if d <= q(0, 1) || d >= config.x3 {
        return Err(out_of_range("planes must lie inside the domain"));
    }
    let below = config.layer_index(-d)?;
    let above = config.layer_index(d)?;
    let free = free_profile(config)?;
    let pol = config.source.polarization;
    let incident = free[below];
    let transmitted = field.lateral_mean(below, pol) / incident;
    let reflected = (field.lateral_mean(above, pol) - free[above]) / incident;
    Ok(TransmissionReport {
        polarization: pol,
        incident,
        transmitted,
        reflected,
        shielding_ratio: transmitted.norm(),
    })
}
