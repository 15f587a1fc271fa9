//! Invariant suite behind `cage-lab check`.

use cage_core::cell_solver::{
    compute_basis, hardy_check, hardy_ratio, random_bump_profiles, shifted_exponential_profile, solve_p_tangential, Space, StripGrid,
};
use cage_core::fdfd::SimulationConfig;
use cage_core::{build_canonical_obstacle, parse_config, serialize_config, topology_certificate, CaseId, Error, Rational};

pub struct Outcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

pub const EXPECTED_DIMENSIONS: [[usize; 3]; 2] = [[4, 3, 2], [3, 4, 5]];
pub const CURL_BOUND: f64 = 1e-12;
pub const DIVERGENCE_BOUND: f64 = 1e-8;
pub const BOUNDARY_BOUND: f64 = 1e-12;

/// Quick structural checks: topology certificates, constructibility, the
/// Hardy inequality and the config round trip.
pub fn structural(seed: u64) -> Vec<Outcome> {
    let mut out = Vec::new();
    for case in CaseId::ALL {
        let obstacle = build_canonical_obstacle(case);
        let cert = topology_certificate(&obstacle);
        let Ok(grid) = StripGrid::new(Some(&obstacle), 8, 1) else {
            out.push(Outcome::new(format!("constructibility {case}"), false, "grid construction failed"));
            continue;
        };
        for dir in [1, 2] {
            let expect_ok = matches!((case, dir), (CaseId::DiscreteObstacle, _) | (CaseId::ParallelWires, 2));
            let got = solve_p_tangential(&grid, dir, &cert);
            let pass = match (&got, expect_ok) {
                (Ok(_), true) => true,
                (Err(Error::NotConstructible(_)), false) => !cert.constructible(dir),
                _ => false,
            };
            let state = match got {
                Ok(_) => "constructed".to_string(),
                Err(e) => e.to_string(),
            };
            out.push(Outcome::new(format!("constructibility {case} p{dir}"), pass, state));
        }
    }

    let profiles = random_bump_profiles(seed, 50);
    match hardy_check(&profiles) {
        Ok(worst) => out.push(Outcome::new("hardy random profiles", worst <= 4.0, format!("max ratio {worst:.6} over 50 profiles (seed {seed})"))),
        Err(e) => out.push(Outcome::new("hardy random profiles", false, e.to_string())),
    }
    let analytic = hardy_ratio(&shifted_exponential_profile(1e-4, 200_001, 60.0));
    out.push(Outcome::new(
        "hardy analytic profile",
        (analytic - 2.0).abs() <= 0.04,
        format!("ratio {analytic:.6}, closed form 2"),
    ));

    let config = SimulationConfig::new(Some(CaseId::WireMesh), Rational::new(1, 4));
    let back = parse_config(&serialize_config(&config));
    out.push(Outcome::new(
        "config round trip",
        matches!(&back, Ok(c) if *c == config),
        "default mesh config",
    ));
    out
}

/// Cohomology bases of both spaces for every case on an `n`, `L` strip.
pub fn cohomology(n: usize, half_height: usize) -> Vec<Outcome> {
    let mut out = Vec::new();
    let mut dims = [[0usize; 3]; 2];
    for (ci, case) in CaseId::ALL.into_iter().enumerate() {
        let obstacle = build_canonical_obstacle(case);
        let grid = match StripGrid::new(Some(&obstacle), n, half_height) {
            Ok(g) => g,
            Err(e) => {
                out.push(Outcome::new(format!("grid {case}"), false, e.to_string()));
                continue;
            }
        };
        for (si, space) in [Space::Normal, Space::Tangential].into_iter().enumerate() {
            let basis = match compute_basis(space, case, &grid) {
                Ok(b) => b,
                Err(e) => {
                    out.push(Outcome::new(format!("basis {space} {case}"), false, e.to_string()));
                    continue;
                }
            };
            dims[si][ci] = basis.dimension;
            let expected = EXPECTED_DIMENSIONS[si][ci];
            out.push(Outcome::new(
                format!("dim {space} {case}"),
                basis.dimension == expected,
                format!("{} (expected {expected})", basis.dimension),
            ));
            for e in &basis.elements {
                let c = e.checks;
                out.push(Outcome::new(
                    format!("element {space} {case} {}", e.kind()),
                    c.curl <= CURL_BOUND && c.divergence <= DIVERGENCE_BOUND && c.boundary <= BOUNDARY_BOUND,
                    format!(
                        "curl {:.2e} div {:.2e} boundary {:.2e} limits +{:?} -{:?}",
                        c.curl, c.divergence, c.boundary, rounded(e.limit_plus), rounded(e.limit_minus)
                    ),
                ));
            }
            out.push(Outcome::new(
                format!("gram {space} {case}"),
                basis.gram_rank == basis.dimension && basis.gram_condition.is_finite(),
                format!("rank {} condition {:.4e}", basis.gram_rank, basis.gram_condition),
            ));
        }
    }
    out.push(Outcome::new(
        "dimension table",
        dims == EXPECTED_DIMENSIONS,
        format!("KN = {:?} KT = {:?}", dims[0], dims[1]),
    ));
    out
}

fn rounded(v: [f64; 3]) -> [f64; 3] {
    v.map(|x| (x * 1e6).round() / 1e6 + 0.0)
}
